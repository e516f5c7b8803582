"""Edit leases: one writer per trajectory, renewable, reclaimable on expiry."""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass

from ..errors import LeaseConflict

DEFAULT_TTL_S = 600.0  # annotation sessions are long; renew rather than lock


@dataclass(frozen=True)
class Lease:
    trajectory_id: str
    annotator_id: str
    token: str
    expires_at: float


class LeaseManager:
    def __init__(self, ttl_s: float = DEFAULT_TTL_S):
        self.ttl_s = ttl_s
        self._leases: dict[str, Lease] = {}
        self._lock = threading.Lock()

    def acquire(self, trajectory_id: str, annotator_id: str, now: float | None = None) -> Lease:
        now = time.time() if now is None else now
        with self._lock:
            current = self._leases.get(trajectory_id)
            if current and current.expires_at > now and current.annotator_id != annotator_id:
                raise LeaseConflict(
                    f"{trajectory_id!r} is being edited by {current.annotator_id!r}"
                )
            lease = Lease(
                trajectory_id=trajectory_id,
                annotator_id=annotator_id,
                token=uuid.uuid4().hex,
                expires_at=now + self.ttl_s,
            )
            self._leases[trajectory_id] = lease
            return lease

    def validate(self, trajectory_id: str, token: str, now: float | None = None) -> Lease:
        now = time.time() if now is None else now
        with self._lock:
            current = self._leases.get(trajectory_id)
            if current is None or current.token != token or current.expires_at <= now:
                raise LeaseConflict(f"no valid lease for {trajectory_id!r}")
            return current

    def renew(self, trajectory_id: str, token: str, now: float | None = None) -> Lease:
        now = time.time() if now is None else now
        current = self.validate(trajectory_id, token, now)
        with self._lock:
            lease = Lease(
                trajectory_id=trajectory_id,
                annotator_id=current.annotator_id,
                token=current.token,
                expires_at=now + self.ttl_s,
            )
            self._leases[trajectory_id] = lease
            return lease

    def release(self, trajectory_id: str, token: str) -> None:
        with self._lock:
            current = self._leases.get(trajectory_id)
            if current and current.token == token:
                del self._leases[trajectory_id]
