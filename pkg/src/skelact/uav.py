"""Action-to-command mapping and a planar kinematic tracking simulator.

The simulated vehicle perpetually corrects its heading toward the human
and regulates its range to a set standoff distance, both with saturated
proportional control, integrated by explicit Euler. The model is planar:
altitude commands appear in the log but do not move the state.

With proportional range control a constantly walking human is followed
with a steady-state lag of (walk speed / Kd) meters; that is physics,
not a bug. Raise ``k_dist`` when a tighter gap matters.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .classify import NULL_ACTION, ClassificationResult
from .errors import CoincidentPositions, ParseError, ScriptOrderError, ValidationError

_EPS = 1e-9


@dataclass(frozen=True)
class Command:
    kind: str                      # takeoff | land | move | hover | null
    direction: tuple[float, float, float] | None = None   # unit vector, move only

    def __post_init__(self):
        if self.kind not in ("takeoff", "land", "move", "hover", "null"):
            raise ValidationError(f"unknown command kind {self.kind!r}")
        if (self.kind == "move") != (self.direction is not None):
            raise ValidationError("direction is for move commands only")
        if self.direction is not None:
            n = math.sqrt(sum(c * c for c in self.direction))
            if abs(n - 1.0) > 1e-6:
                raise ValidationError(f"direction norm {n}, expected 1")

    def __str__(self) -> str:
        if self.kind == "move":
            return "move({:+.0f},{:+.0f},{:+.0f})".format(*self.direction)
        return self.kind


TAKEOFF = Command("takeoff")
LAND = Command("land")
HOVER = Command("hover")
NULL = Command("null")
MOVE_LEFT = Command("move", (-1.0, 0.0, 0.0))
MOVE_RIGHT = Command("move", (1.0, 0.0, 0.0))
MOVE_UP = Command("move", (0.0, 0.0, 1.0))

# The six field-trial gestures. Both candidate lunge labels map to hover so
# the table works with either class subset.
DEFAULT_COMMAND_TABLE: dict[str, Command] = {
    "a24": TAKEOFF,
    "a6": LAND,
    "a1": MOVE_LEFT,
    "a9": MOVE_RIGHT,
    "a7": MOVE_UP,
    "a26": HOVER,
    "a27": HOVER,
}

# For the bundled synthetic gesture set.
SYNTHETIC_COMMAND_TABLE: dict[str, Command] = {
    "raise_right": TAKEOFF,
    "lower_right": LAND,
    "swipe_left": MOVE_LEFT,
    "swipe_right": MOVE_RIGHT,
    "circle_right": MOVE_UP,
    "squat": HOVER,
}


@dataclass
class SimState:
    """Vehicle and target state plus the control parameters acting on it."""

    uav_x: float = 0.0
    uav_y: float = 0.0
    yaw: float = 0.0               # radians, world frame
    human_x: float = 6.0
    human_y: float = 0.0
    set_distance: float = 6.0
    k_yaw: float = 1.5             # /s
    k_dist: float = 0.8            # /s
    max_yaw_rate: float = 1.0      # rad/s
    max_speed: float = 2.0         # m/s
    dt: float = 1.0 / 30.0
    t: float = 0.0

    def __post_init__(self):
        if self.set_distance <= 0 or self.max_yaw_rate <= 0 \
                or self.max_speed <= 0 or self.dt <= 0:
            raise ValidationError("set distance, limits and dt must be positive")

    @property
    def range(self) -> float:
        return math.hypot(self.human_x - self.uav_x, self.human_y - self.uav_y)

    @property
    def bearing_error(self) -> float:
        """Wrapped angle from the vehicle heading to the human, in [-pi, pi]."""
        dx = self.human_x - self.uav_x
        dy = self.human_y - self.uav_y
        return math.remainder(math.atan2(dy, dx) - self.yaw, math.tau)


def track_step(state: SimState) -> tuple[float, float, SimState]:
    """One Euler step of the heading/range controller.

    Returns the saturated yaw rate and forward velocity applied during the
    step, plus the advanced state.
    """
    if state.range < _EPS:
        raise CoincidentPositions("human and vehicle positions coincide")
    beta = state.bearing_error
    yaw_rate = max(-state.max_yaw_rate,
                   min(state.max_yaw_rate, state.k_yaw * beta))
    speed = max(-state.max_speed,
                min(state.max_speed, state.k_dist * (state.range - state.set_distance)))
    new = replace(
        state,
        uav_x=state.uav_x + speed * math.cos(state.yaw) * state.dt,
        uav_y=state.uav_y + speed * math.sin(state.yaw) * state.dt,
        yaw=math.remainder(state.yaw + yaw_rate * state.dt, math.tau),
        t=state.t + state.dt,
    )
    return yaw_rate, speed, new


@dataclass
class CommandDispatcher:
    """Stateful label-to-command lookup with a repeat-suppression window."""

    table: dict[str, Command] = field(default_factory=lambda: dict(DEFAULT_COMMAND_TABLE))
    debounce_s: float = 2.0
    _last_label: str | None = field(default=None, repr=False)
    _last_t: float = field(default=-math.inf, repr=False)

    def dispatch(self, result: ClassificationResult, t: float) -> Command:
        """Map a classification to a command; repeats within the window
        and rejected (null-action) results yield null."""
        label = result.label
        if label == NULL_ACTION:
            return NULL
        if label == self._last_label and t - self._last_t < self.debounce_s:
            return NULL
        self._last_label = label
        self._last_t = t
        return self.table.get(label, NULL)


# ---------------------------------------------------------------------------
# Scenario scripts

@dataclass
class ScenarioEvent:
    t: float
    human_x: float
    human_y: float
    label: str | None = None


def load_scenario(path: str | Path) -> list[ScenarioEvent]:
    """CSV rows of ``t,human_x,human_y[,label]`` with increasing time."""
    events = []
    with open(path, newline="") as f:
        reader = csv.reader(f)
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if lineno == 1 and row[0].strip().lower() in ("t", "time"):
                continue
            if len(row) not in (3, 4):
                raise ParseError(f"line {lineno}: expected 3 or 4 fields, got {len(row)}")
            try:
                t, hx, hy = float(row[0]), float(row[1]), float(row[2])
            except ValueError as e:
                raise ParseError(f"line {lineno}: {e}") from e
            label = row[3].strip() if len(row) == 4 and row[3].strip() else None
            events.append(ScenarioEvent(t=t, human_x=hx, human_y=hy, label=label))
    for a, b in zip(events, events[1:]):
        if b.t <= a.t:
            raise ScriptOrderError(f"timestamps not increasing at t={b.t}")
    return events


def _human_at(events: list[ScenarioEvent], t: float) -> tuple[float, float]:
    """Piecewise-linear interpolation of the scripted human path."""
    if t <= events[0].t:
        return events[0].human_x, events[0].human_y
    for a, b in zip(events, events[1:]):
        if t <= b.t:
            u = (t - a.t) / (b.t - a.t)
            return (a.human_x + u * (b.human_x - a.human_x),
                    a.human_y + u * (b.human_y - a.human_y))
    return events[-1].human_x, events[-1].human_y


@dataclass
class LogRow:
    t: float
    uav_x: float
    uav_y: float
    yaw: float
    human_x: float
    human_y: float
    beta: float
    range: float
    yaw_rate: float
    speed: float
    command: str


def run_scenario(events: list[ScenarioEvent], state: SimState | None = None,
                 dispatcher: CommandDispatcher | None = None,
                 duration_s: float | None = None) -> list[LogRow]:
    """Step the simulator through a scripted scenario.

    Each tick moves the human along the interpolated script path and runs
    one controller step; label events fire through the dispatcher at their
    scripted time. Between events the command column reads ``null``.
    """
    state = state if state is not None else SimState()
    dispatcher = dispatcher or CommandDispatcher()
    if duration_s is None:
        duration_s = (events[-1].t - state.t) if events else 5.0
    if duration_s < 0:
        raise ValidationError("script ends before the simulation starts")

    pending = [e for e in events if e.label is not None]
    log: list[LogRow] = []
    # One tick past the script end so an event on the final row still fires.
    n_steps = int(round(duration_s / state.dt)) + 1
    for _ in range(n_steps):
        if events:
            hx, hy = _human_at(events, state.t)
            state = replace(state, human_x=hx, human_y=hy)
        command = NULL
        # Half-tick tolerance delivers each event on its nearest tick and
        # absorbs the float drift of repeatedly summing dt.
        while pending and pending[0].t <= state.t + 0.5 * state.dt:
            event = pending.pop(0)
            fake = ClassificationResult(label=event.label, neighbors=[],
                                        votes={}, elapsed_ms=0.0)
            dispatched = dispatcher.dispatch(fake, event.t)
            if dispatched.kind != "null":
                command = dispatched
        beta, rng = state.bearing_error, state.range
        yaw_rate, speed, state = track_step(state)
        log.append(LogRow(t=state.t, uav_x=state.uav_x, uav_y=state.uav_y,
                          yaw=state.yaw, human_x=state.human_x,
                          human_y=state.human_y, beta=beta, range=rng,
                          yaw_rate=yaw_rate, speed=speed, command=str(command)))
    return log


def write_log(log: list[LogRow], path: str | Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "uav_x", "uav_y", "yaw", "human_x", "human_y",
                    "beta", "range", "yaw_rate", "speed", "command"])
        for row in log:
            w.writerow([f"{row.t:.4f}", f"{row.uav_x:.4f}", f"{row.uav_y:.4f}",
                        f"{row.yaw:.4f}", f"{row.human_x:.4f}",
                        f"{row.human_y:.4f}", f"{row.beta:.4f}",
                        f"{row.range:.4f}", f"{row.yaw_rate:.4f}",
                        f"{row.speed:.4f}", row.command])
