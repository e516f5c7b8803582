"""HTTP service exposing browsing, annotation, export, and eval runs."""

from .app import create_app, versioned
from .leases import DEFAULT_TTL_S, Lease, LeaseManager

__all__ = ["DEFAULT_TTL_S", "Lease", "LeaseManager", "create_app", "versioned"]
