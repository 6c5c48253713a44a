"""
SQLAlchemy engine and session factory for the run archive.

The archive is a single SQLite file; readers and the Stage 7 writer share one
engine per process.
"""
from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

# Declarative base for archive models
Base = declarative_base()


def sqlite_url(path: str | Path) -> str:
    return f"sqlite:///{Path(path)}"


def create_archive_engine(database_url: str) -> Engine:
    """Create the engine and the tables it needs."""
    connect_args = {"check_same_thread": False} if database_url.startswith("sqlite") else {}
    engine = create_engine(database_url, pool_pre_ping=True, echo=False, connect_args=connect_args)
    # Models must be imported before create_all sees them.
    from ceres.store import models  # noqa: F401

    Base.metadata.create_all(engine)
    return engine


def make_session_factory(engine: Engine) -> sessionmaker:
    return sessionmaker(autocommit=False, autoflush=False, expire_on_commit=False, bind=engine)


@contextmanager
def session_scope(factory: sessionmaker) -> Iterator[Session]:
    """
    Yield a session and ensure it's closed after use.

    Usage:
        with session_scope(factory) as db:
            db.query(RunRow).all()
    """
    db = factory()
    try:
        yield db
    finally:
        db.close()
