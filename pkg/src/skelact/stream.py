"""Live-stream segmentation: cut a frame stream into gesture sequences.

A gesture is a burst of motion bounded by stillness. The segmenter tracks
per-frame motion energy (mean landmark displacement) and closes a segment
once the energy stays below threshold for the idle-gap duration; trailing
idle frames are trimmed off the emitted segment.

For pipe-fed operation a reader thread ingests frames into a bounded
channel while the caller's thread segments and classifies. When the
channel is full the oldest frame is dropped and counted, so a slow
classifier degrades coverage instead of stalling the producer.
"""
from __future__ import annotations

import logging
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from .skeleton_io import PoseSequence, Skeleton3D

log = logging.getLogger(__name__)

_MIN_SEGMENT_FRAMES = 5


@dataclass
class StreamConfig:
    idle_gap_s: float = 0.5
    motion_threshold: float = 0.02   # meters of mean landmark travel per frame
    queue_size: int = 64


@dataclass
class GapSegmenter:
    """Stateful segment cutter; push frames, collect finished sequences."""

    config: StreamConfig = field(default_factory=StreamConfig)
    _buffer: list[Skeleton3D] = field(default_factory=list, repr=False)
    _prev: Skeleton3D | None = field(default=None, repr=False)
    _last_motion_t: float | None = field(default=None, repr=False)
    skipped_nonmonotonic: int = 0

    def push(self, frame: Skeleton3D) -> PoseSequence | None:
        """Feed one frame; returns a completed segment when a gap closes one."""
        if self._prev is not None and frame.timestamp <= self._prev.timestamp:
            self.skipped_nonmonotonic += 1
            return None
        prev, self._prev = self._prev, frame
        if prev is None:
            return None
        energy = float(np.mean(np.linalg.norm(frame.points - prev.points, axis=1)))
        moving = energy >= self.config.motion_threshold

        if self._last_motion_t is None:
            if moving:
                # The previous frame is where the motion started from.
                self._buffer = [prev, frame]
                self._last_motion_t = frame.timestamp
            return None

        self._buffer.append(frame)
        if moving:
            self._last_motion_t = frame.timestamp
            return None
        if frame.timestamp - self._last_motion_t >= self.config.idle_gap_s:
            return self._cut()
        return None

    def _cut(self) -> PoseSequence | None:
        end_t = self._last_motion_t
        frames = [f for f in self._buffer if f.timestamp <= end_t]
        self._buffer = []
        self._last_motion_t = None
        if len(frames) < _MIN_SEGMENT_FRAMES:
            return None
        return PoseSequence(frames)

    def flush(self) -> PoseSequence | None:
        """Close out a segment still in progress at end of stream."""
        if self._last_motion_t is None:
            return None
        return self._cut()


class FrameChannel:
    """Bounded frame queue that sheds the oldest frame when full."""

    def __init__(self, capacity: int):
        self._frames: deque = deque()
        self._capacity = capacity
        self._cv = threading.Condition()
        self._closed = False
        self.dropped = 0

    def put(self, frame: Skeleton3D) -> None:
        with self._cv:
            if len(self._frames) >= self._capacity:
                self._frames.popleft()
                self.dropped += 1
            self._frames.append(frame)
            self._cv.notify()

    def close(self) -> None:
        with self._cv:
            self._closed = True
            self._cv.notify_all()

    def get(self) -> Skeleton3D | None:
        """Next frame, or None once the channel is closed and drained."""
        with self._cv:
            while not self._frames and not self._closed:
                self._cv.wait()
            if self._frames:
                return self._frames.popleft()
            return None

    def __iter__(self) -> Iterator[Skeleton3D]:
        while (frame := self.get()) is not None:
            yield frame


@dataclass
class StreamStats:
    frames_in: int = 0
    frames_dropped: int = 0
    segments: int = 0
    skipped_nonmonotonic: int = 0


def run_stream(frames: Iterable[Skeleton3D],
               on_segment: Callable[[PoseSequence], None],
               config: StreamConfig | None = None) -> StreamStats:
    """Reader-thread / worker-loop pump from a frame source to a handler.

    The reader drains ``frames`` (typically parsed from a pipe) into the
    bounded channel; this thread segments and hands every finished
    sequence to ``on_segment``. Returns ingest statistics.
    """
    config = config or StreamConfig()
    channel = FrameChannel(config.queue_size)
    stats = StreamStats()

    def read():
        try:
            for frame in frames:
                stats.frames_in += 1
                channel.put(frame)
        finally:
            channel.close()

    reader = threading.Thread(target=read, name="stream-reader", daemon=True)
    reader.start()

    segmenter = GapSegmenter(config)
    for frame in channel:
        segment = segmenter.push(frame)
        if segment is not None:
            stats.segments += 1
            on_segment(segment)
    tail = segmenter.flush()
    if tail is not None:
        stats.segments += 1
        on_segment(tail)

    reader.join()
    stats.frames_dropped = channel.dropped
    stats.skipped_nonmonotonic = segmenter.skipped_nonmonotonic
    if stats.frames_dropped:
        log.warning("dropped %d frames under back-pressure", stats.frames_dropped)
    return stats
