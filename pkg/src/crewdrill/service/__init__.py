"""HTTP and WebSocket surface for a live session."""

from .app import create_app

__all__ = ["create_app"]
