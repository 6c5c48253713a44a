"""Command-line entry points: run, backtest, grade and report."""
