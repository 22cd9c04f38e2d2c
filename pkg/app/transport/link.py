"""Connectivity schedule of the device towards the nearest cellular server unit"""
import bisect
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Optional, Sequence

from .exceptions import InvalidLinkModelError

# far enough for any simulated session
HORIZON_MS = 10 ** 15


@dataclass(frozen=True)
class LinkWindow:
    """The link is up from `from_ms` (inclusive) to `to_ms` (exclusive)"""
    from_ms: int
    to_ms: int
    bandwidth_bytes_per_s: float
    rtt_ms: float

    def __post_init__(self):
        if self.to_ms <= self.from_ms:
            raise InvalidLinkModelError(f'Interval [{self.from_ms}, {self.to_ms}) is empty')
        if not self.bandwidth_bytes_per_s > 0 or self.rtt_ms < 0:
            raise InvalidLinkModelError('Bandwidth must be positive and rtt cannot be negative')

    def transfer_ms(self, size: int) -> float:
        return size / self.bandwidth_bytes_per_s * 1000 + self.rtt_ms

    @classmethod
    def from_sequence(cls, item: Sequence) -> 'LinkWindow':
        if isinstance(item, Mapping):
            return cls(int(item['from_ms']), int(item['to_ms']), float(item['bandwidth_bytes_per_s']),
                       float(item['rtt_ms']))
        from_ms, to_ms, bandwidth, rtt = item
        return cls(int(from_ms), int(to_ms), float(bandwidth), float(rtt))

    def to_list(self) -> list:
        return [self.from_ms, self.to_ms, self.bandwidth_bytes_per_s, self.rtt_ms]


class LinkModel:
    """Sorted, non-overlapping connected intervals; outside them the link is down"""

    def __init__(self, windows: Iterable[LinkWindow]):
        self._windows: List[LinkWindow] = list(windows)
        for previous, current in zip(self._windows, self._windows[1:]):
            if current.from_ms < previous.to_ms:
                raise InvalidLinkModelError(f'Interval starting at {current.from_ms} overlaps or precedes '
                                            f'the one ending at {previous.to_ms}')
        self._starts = [window.from_ms for window in self._windows]

    @property
    def windows(self) -> List[LinkWindow]:
        return list(self._windows)

    def window_at(self, now_ms: float) -> Optional[LinkWindow]:
        index = bisect.bisect_right(self._starts, now_ms) - 1
        if index >= 0 and now_ms < self._windows[index].to_ms:
            return self._windows[index]
        return None

    def is_up(self, now_ms: float) -> bool:
        return self.window_at(now_ms) is not None

    def next_up(self, now_ms: float) -> Optional[float]:
        """The earliest moment from `now_ms` on when the link is up"""
        if self.is_up(now_ms):
            return now_ms
        index = bisect.bisect_right(self._starts, now_ms)
        return self._windows[index].from_ms if index < len(self._windows) else None

    @classmethod
    def from_schedule(cls, schedule: Iterable[Sequence]) -> 'LinkModel':
        return cls(LinkWindow.from_sequence(item) for item in schedule)

    def to_schedule(self) -> List[list]:
        return [window.to_list() for window in self._windows]


def always_up(bandwidth_bytes_per_s: float = 1_000_000, rtt_ms: float = 50) -> LinkModel:
    return LinkModel([LinkWindow(0, HORIZON_MS, bandwidth_bytes_per_s, rtt_ms)])


def outage(down_from_ms: int, down_until_ms: int, bandwidth_bytes_per_s: float = 1_000_000,
           rtt_ms: float = 50) -> LinkModel:
    """Link which is up except for one outage"""
    windows = []
    if down_from_ms > 0:
        windows.append(LinkWindow(0, down_from_ms, bandwidth_bytes_per_s, rtt_ms))
    windows.append(LinkWindow(down_until_ms, HORIZON_MS, bandwidth_bytes_per_s, rtt_ms))
    return LinkModel(windows)


def roadside_unit(passes: Iterable[Sequence[int]], bandwidth_bytes_per_s: float = 5_000_000,
                  rtt_ms: float = 10) -> LinkModel:
    """On-road smart city units: fast short links while the vehicle passes a unit"""
    return LinkModel(LinkWindow(int(start), int(end), bandwidth_bytes_per_s, rtt_ms) for start, end in passes)
