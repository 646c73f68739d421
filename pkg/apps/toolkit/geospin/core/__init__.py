"""Core configuration and errors."""

from geospin.core.config import settings

__all__ = ["settings"]
