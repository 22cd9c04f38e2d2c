"""Outbound FIFO of sealed envelopes and the delivery tick"""
import collections
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Deque, List, Optional

from app.detector import DetectionClass
from app.vault import EnvelopeHeader, parse_envelope_header
from . import logger
from .exceptions import QueueFullError
from .link import LinkModel

AgentSink = Callable[[bytes], Any]


@dataclass
class PendingEnvelope:
    envelope_id: int
    envelope: bytes = field(repr=False)
    enqueued_at_ms: int
    header: EnvelopeHeader = field(repr=False)
    fallback_sent: bool = False

    @property
    def size(self) -> int:
        return len(self.envelope)


@dataclass(frozen=True)
class Transfer:
    """One full delivery of an envelope. `wire` holds exactly the bytes which crossed the link"""
    envelope_id: int
    latency_ms: float
    size_bytes: int
    enqueued_at_ms: int
    started_at_ms: float
    completed_at_ms: float
    wire: bytes = field(repr=False, compare=False, default=b'')


@dataclass(frozen=True)
class TextFallbackRecord:
    """Text message sent while the link is down for too long. It carries metadata only, never the payload"""
    session_id: bytes
    timestamp_ms: int
    category: DetectionClass
    confidence_x1e4: int
    envelope_id: int = 0
    sent_at_ms: int = 0

    @property
    def payload_bytes(self) -> int:
        return 0

    def to_line(self) -> str:
        return f'SMS {self.session_id.hex()} {self.timestamp_ms} {self.category.label} {self.confidence_x1e4}'


@dataclass(frozen=True)
class TickResult:
    transfers: List[Transfer] = field(default_factory=list)
    fallbacks: List[TextFallbackRecord] = field(default_factory=list)


class OutboundQueue:
    """
    Single-producer single-consumer FIFO between the decision support machine and the uplink. Both sides may run in
    different threads: every access to the shared deque and counters happens under one lock.
    """

    def __init__(self, capacity: int = 1024, deadline_ms: int = 300000):
        if capacity <= 0 or deadline_ms <= 0:
            raise ValueError('Capacity and fallback deadline must be positive')
        self._capacity = capacity
        self._deadline_ms = deadline_ms
        self._pending: Deque[PendingEnvelope] = collections.deque()
        self._lock = threading.Lock()
        self._next_id = 1
        self._delivered = 0
        self._fallback_sent = 0
        self._busy_until_ms = 0.0
        self._last_tick_ms: Optional[float] = None

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def deadline_ms(self) -> int:
        return self._deadline_ms

    @property
    def delivered(self) -> int:
        with self._lock:
            return self._delivered

    @property
    def fallback_sent(self) -> int:
        with self._lock:
            return self._fallback_sent

    @property
    def pending(self) -> List[PendingEnvelope]:
        with self._lock:
            return list(self._pending)

    def __len__(self) -> int:
        with self._lock:
            return len(self._pending)

    def enqueue(self, envelope: bytes, now_ms: int) -> PendingEnvelope:
        """Appends a sealed envelope to the tail"""
        header = parse_envelope_header(envelope)
        with self._lock:
            if len(self._pending) >= self._capacity:
                raise QueueFullError(f'Outbound queue is full ({self._capacity} envelopes)')
            item = PendingEnvelope(envelope_id=self._next_id, envelope=envelope, enqueued_at_ms=now_ms, header=header)
            self._next_id += 1
            self._pending.append(item)
        logger.info(f'Envelope {item.envelope_id} ({item.size} bytes) was queued at {now_ms} ms')
        return item

    def head(self) -> Optional[PendingEnvelope]:
        """Oldest envelope still waiting, None if the queue is empty"""
        with self._lock:
            return self._pending[0] if self._pending else None

    def mark_delivered(self, item: PendingEnvelope, completed_at_ms: float):
        """Removes the delivered head and keeps the link busy until its transfer is over"""
        with self._lock:
            if not self._pending or self._pending[0] is not item:
                raise RuntimeError(f'Envelope {item.envelope_id} is not at the head of the queue')
            self._pending.popleft()
            self._delivered += 1
            self._busy_until_ms = completed_at_ms

    def take_overdue(self, now_ms: float) -> List[PendingEnvelope]:
        """Marks and returns the envelopes which waited past the deadline and have not had a text fallback yet"""
        with self._lock:
            overdue = [item for item in self._pending
                       if not item.fallback_sent and now_ms - item.enqueued_at_ms > self._deadline_ms]
            for item in overdue:
                item.fallback_sent = True
            self._fallback_sent += len(overdue)
            return overdue

    def advance_clock(self, now_ms: float) -> float:
        """
        Moves the queue clock to `now_ms`.
        :return: moment the next transfer may start, later than `now_ms` while one is still in flight
        """
        with self._lock:
            if self._last_tick_ms is not None and now_ms < self._last_tick_ms:
                raise ValueError(f'Tick at {now_ms} ms goes back from {self._last_tick_ms} ms')
            self._last_tick_ms = now_ms
            return max(now_ms, self._busy_until_ms)


def tick(queue: OutboundQueue, link: LinkModel, now_ms: float, agent_sink: AgentSink) -> TickResult:
    """
    Moves envelopes from the head of the queue to the agent while the link is up at `now_ms`.
    Deliveries go one after another: each starts when the previous one is over and must end before the current
    connected interval does, otherwise the envelope waits for the next interval whole. An envelope which is older than
    the queue deadline while the link is down gets a text fallback record once and stays queued.
    :param queue: outbound queue
    :param link: connectivity schedule
    :param now_ms: simulated time, never decreasing between calls
    :param agent_sink: receives the envelope bytes; if it raises, the envelope stays at the head
    :return: transfers and fallback records of this tick
    """
    cursor = queue.advance_clock(now_ms)
    window = link.window_at(now_ms)
    if window is None:
        fallbacks = []
        for item in queue.take_overdue(now_ms):
            record = TextFallbackRecord(session_id=item.header.session_id, timestamp_ms=item.header.timestamp_ms,
                                        category=item.header.category, confidence_x1e4=item.header.confidence_x1e4,
                                        envelope_id=item.envelope_id, sent_at_ms=int(now_ms))
            logger.warning(record.to_line())
            fallbacks.append(record)
        return TickResult(fallbacks=fallbacks)

    transfers = []
    while True:
        item = queue.head()
        if item is None or cursor >= window.to_ms:
            break
        latency = window.transfer_ms(item.size)
        if cursor + latency > window.to_ms:
            logger.info(f'Envelope {item.envelope_id} does not fit into the link interval, it waits')
            break
        agent_sink(item.envelope)
        completed_at = cursor + latency
        queue.mark_delivered(item, completed_at)
        transfers.append(Transfer(envelope_id=item.envelope_id, latency_ms=latency, size_bytes=item.size,
                                  enqueued_at_ms=item.enqueued_at_ms, started_at_ms=cursor,
                                  completed_at_ms=completed_at, wire=item.envelope))
        logger.info(f'Envelope {item.envelope_id} was delivered in {latency:.1f} ms')
        cursor = completed_at
    return TickResult(transfers=transfers)
