"""Command-line launcher for the manifold MLS tools."""

from __future__ import annotations

from manifold_mls.cli import app

if __name__ == "__main__":  # pragma: no cover - CLI entrypoint
    app()
