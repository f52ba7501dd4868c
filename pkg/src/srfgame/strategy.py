"""Strategy representations: AIF functions, chattering arcs and composites."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import OutOfDomain, ParseError

_SLACK = 1e-9


def _domain(v, cap: float):
    arr = np.asarray(v, dtype=float)
    if np.any(arr < -_SLACK * max(cap, 1)) or np.any(arr > cap * (1 + _SLACK) + _SLACK):
        raise OutOfDomain(f"strategy argument outside [0, {cap}]")
    return arr


@dataclass(frozen=True)
class AifStrategy:
    """Alternating identity-and-flat function on [0, cap].

    Segment j (between consecutive switch points, counting from 0) is the
    identity for even j and flat at the left limit for odd j. No switch
    points gives the identity.
    """

    cap: float
    switch_points: tuple = ()

    def __post_init__(self):
        sp = tuple(float(t) for t in self.switch_points)
        object.__setattr__(self, "switch_points", sp)
        if not self.cap > 0:
            raise ValueError("cap must be positive")
        if any(b <= a for a, b in zip(sp, sp[1:])):
            raise ValueError(f"switch points must be strictly increasing: {sp}")
        if sp and not (0 < sp[0] and sp[-1] < self.cap):
            raise ValueError(f"switch points must lie in (0, cap): {sp}")

    @classmethod
    def flat_above(cls, cap: float, level: float) -> "AifStrategy":
        """min{v, level}; the identity when level is not below cap."""
        return cls(cap, (level,) if level < cap else ())

    @property
    def order(self) -> int:
        return len(self.switch_points)

    def eval(self, v):
        arr = _domain(v, self.cap)
        if not self.switch_points:
            out = arr.copy()
        else:
            sp = np.asarray(self.switch_points)
            j = np.searchsorted(sp, arr, side="right")
            level = sp[np.maximum(j - 1, 0)]
            out = np.where(j % 2 == 0, arr, level)
        return float(out) if np.ndim(v) == 0 else out

    __call__ = eval

    def generalized_inverse(self, x):
        """inf{v : s(v) >= x}, +inf when no such v exists in [0, cap]."""
        arr = np.asarray(x, dtype=float)
        sp = np.asarray(self.switch_points)
        m = sp.size
        out = arr.copy()
        if m:
            j = np.searchsorted(sp, arr, side="left")
            gap = j % 2 == 1
            right = np.where(j < m, sp[np.minimum(j, m - 1)], math.inf)
            out = np.where(gap, right, arr)
        sup = self.sup_value()
        out = np.where(arr > sup, math.inf, out)
        return float(out) if np.ndim(x) == 0 else out

    def sup_value(self) -> float:
        return self.switch_points[-1] if self.order % 2 == 1 else self.cap

    def to_dict(self) -> dict:
        return {"cap": self.cap, "switch_points": list(self.switch_points)}


@dataclass(frozen=True)
class ChatteringStrategy:
    """Tabulated singular arc eta on [entry, exit], linearly interpolated."""

    entry: float
    exit: float
    v: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)
    exit_reason: str = ""
    diagnostics: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        eta = np.asarray(self.eta, dtype=float)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "eta", eta)
        if v.ndim != 1 or v.shape != eta.shape or v.size < 1:
            raise ValueError("chattering grid must be two equal-length 1-D arrays")
        if np.any(np.diff(v) <= 0):
            raise ValueError("chattering grid must be strictly increasing in v")

    def eval(self, v):
        return np.interp(v, self.v, self.eta)

    def __eq__(self, other):
        return (
            isinstance(other, ChatteringStrategy)
            and (self.entry, self.exit, self.exit_reason) == (other.entry, other.exit, other.exit_reason)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.eta, other.eta)
        )

    def to_dict(self) -> dict:
        return {
            "entry": self.entry,
            "exit": self.exit,
            "exit_reason": self.exit_reason,
            "grid": np.column_stack([self.v, self.eta]).tolist(),
        }


@dataclass(frozen=True, eq=False)
class EquilibriumStrategy:
    """AIF prefix, then an optional chattering arc, then an optional terminal flat."""

    prefix: AifStrategy
    chattering: Optional[ChatteringStrategy] = None
    terminal_flat: Optional[float] = None

    def __post_init__(self):
        if self.chattering is not None:
            sp = self.prefix.switch_points
            if sp and sp[-1] > self.chattering.entry:
                raise ValueError("prefix switch points must precede the chattering entry")
            if self.terminal_flat is None:
                object.__setattr__(self, "terminal_flat", float(self.chattering.eta[-1]))
        elif self.terminal_flat is not None:
            raise ValueError("a terminal flat level requires a chattering segment")

    @classmethod
    def of(cls, s: "StrategyLike") -> "EquilibriumStrategy":
        return s if isinstance(s, EquilibriumStrategy) else cls(s)

    @property
    def cap(self) -> float:
        return self.prefix.cap

    @property
    def switch_points(self) -> tuple:
        return self.prefix.switch_points

    def eval(self, v):
        arr = _domain(v, self.cap)
        out = self.prefix.eval(arr)
        ch = self.chattering
        if ch is not None:
            out = np.where(arr >= ch.entry, ch.eval(arr), out)
            out = np.where(arr > ch.exit, self.terminal_flat, out)
        return float(out) if np.ndim(v) == 0 else out

    __call__ = eval

    def sup_value(self) -> float:
        if self.chattering is not None:
            return float(self.terminal_flat)
        return self.prefix.sup_value()

    def __eq__(self, other):
        return (
            isinstance(other, EquilibriumStrategy)
            and self.prefix == other.prefix
            and self.chattering == other.chattering
            and self.terminal_flat == other.terminal_flat
        )

    def to_dict(self) -> dict:
        return {
            "cap": self.cap,
            "switch_points": list(self.switch_points),
            "chattering": None if self.chattering is None else self.chattering.to_dict(),
            "terminal_flat": self.terminal_flat,
        }


StrategyLike = Union[AifStrategy, EquilibriumStrategy]


def _number(obj: dict, key: str, where: str, optional: bool = False):
    if key not in obj:
        if optional:
            return None
        raise ParseError(f"{where}: missing field '{key}'")
    val = obj[key]
    if val is None and optional:
        return None
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ParseError(f"{where}: field '{key}' must be a number, got {val!r}")
    return float(val)


def strategy_from_dict(obj, where: str = "strategy") -> EquilibriumStrategy:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected a JSON object")
    cap = _number(obj, "cap", where)
    sp = obj.get("switch_points", [])
    if not isinstance(sp, list):
        raise ParseError(f"{where}: field 'switch_points' must be a list")
    for i, t in enumerate(sp):
        if isinstance(t, bool) or not isinstance(t, (int, float)):
            raise ParseError(f"{where}: switch_points[{i}] must be a number, got {t!r}")
    ch = obj.get("chattering")
    chattering = None
    if ch is not None:
        if not isinstance(ch, dict):
            raise ParseError(f"{where}: field 'chattering' must be an object or null")
        grid = ch.get("grid")
        try:
            arr = np.asarray(grid, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{where}: chattering.grid is not numeric: {exc}") from None
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ParseError(f"{where}: chattering.grid must be a list of [v, eta] pairs")
        reason = ch.get("exit_reason", "")
        try:
            chattering = ChatteringStrategy(
                _number(ch, "entry", where + ".chattering"),
                _number(ch, "exit", where + ".chattering"),
                arr[:, 0], arr[:, 1], str(reason),
            )
        except ValueError as exc:
            raise ParseError(f"{where}.chattering: {exc}") from None
    flat = _number(obj, "terminal_flat", where, optional=True)
    try:
        return EquilibriumStrategy(AifStrategy(cap, tuple(sp)), chattering, flat)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from None


def serialize(s: StrategyLike) -> str:
    return json.dumps(EquilibriumStrategy.of(s).to_dict(), indent=2)


def deserialize(text: str) -> EquilibriumStrategy:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return strategy_from_dict(obj)


def save_strategy(s: StrategyLike, path: Union[str, Path]) -> None:
    Path(path).write_text(serialize(s))


def load_strategy(path: Union[str, Path]) -> EquilibriumStrategy:
    return deserialize(Path(path).read_text())


def save_profile(profile, path: Union[str, Path]) -> None:
    """Write one strategy, or a {"players": [...]} document for several."""
    if isinstance(profile, (AifStrategy, EquilibriumStrategy)):
        save_strategy(profile, path)
    else:
        doc = {"players": [EquilibriumStrategy.of(s).to_dict() for s in profile]}
        Path(path).write_text(json.dumps(doc, indent=2))


def load_profile(path: Union[str, Path]) -> list[EquilibriumStrategy]:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if isinstance(obj, dict) and "players" in obj:
        players = obj["players"]
        if not isinstance(players, list) or not players:
            raise ParseError(f"{path}: 'players' must be a non-empty list")
        return [strategy_from_dict(p, f"players[{i}]") for i, p in enumerate(players)]
    return [strategy_from_dict(obj)]
