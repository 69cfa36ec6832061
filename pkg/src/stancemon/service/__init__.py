"""Human-in-the-loop review service."""

from .app import ServeConfig, create_app
from .store import ReviewItem, ReviewStatus, ReviewStore

__all__ = ["ServeConfig", "create_app", "ReviewItem", "ReviewStatus", "ReviewStore"]
