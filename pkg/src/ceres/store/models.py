"""
SQLAlchemy models for the run archive.

``runs`` holds one row per pipeline run; ``run_snapshots`` one row per region
per run, immutable once written.
"""
from sqlalchemy import (
    Boolean,
    Column,
    Date,
    DateTime,
    Float,
    ForeignKey,
    Integer,
    String,
    Text,
    UniqueConstraint,
)
from sqlalchemy.orm import relationship

from ceres.store.database import Base


class RunRow(Base):
    """One completed (or in-progress) weekly run."""

    __tablename__ = "runs"

    run_id = Column(String(64), primary_key=True)
    run_date = Column(Date, nullable=False, index=True)
    run_ts = Column(DateTime, nullable=False)
    config_version = Column(String(50), nullable=True)
    status = Column(String(20), nullable=False, default="running")
    report_json = Column(Text, nullable=True)

    snapshots = relationship("SnapshotRow", back_populates="run", cascade="all, delete-orphan")

    def __repr__(self):
        return f"<RunRow(run_id={self.run_id}, run_date={self.run_date}, status={self.status})>"


class SnapshotRow(Base):
    """Full probability vector, interval, tier and drivers for one region in one run."""

    __tablename__ = "run_snapshots"

    id = Column(Integer, primary_key=True, autoincrement=True)
    run_id = Column(String(64), ForeignKey("runs.run_id"), nullable=False, index=True)
    region_id = Column(String(3), nullable=False, index=True)
    run_ts = Column(DateTime, nullable=False)
    reference_date = Column(Date, nullable=False)
    p3 = Column(Float, nullable=False)
    p4 = Column(Float, nullable=False)
    p5 = Column(Float, nullable=False)
    interval_low = Column(Float, nullable=False)
    interval_high = Column(Float, nullable=False)
    alert_tier = Column(String(10), nullable=False)
    top_drivers = Column(Text, nullable=False, default="[]")
    coverage_factor = Column(Float, nullable=False)
    low_coverage = Column(Boolean, nullable=False, default=False)
    hypothesis_id = Column(String(40), nullable=False, index=True)
    hypothesis_json = Column(Text, nullable=False)

    __table_args__ = (UniqueConstraint("run_id", "region_id", name="uq_snapshot_run_region"),)

    run = relationship("RunRow", back_populates="snapshots")

    def __repr__(self):
        return f"<SnapshotRow(run_id={self.run_id}, region_id={self.region_id}, tier={self.alert_tier})>"
