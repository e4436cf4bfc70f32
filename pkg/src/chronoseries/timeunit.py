"""Time units and calendar-aware epoch arithmetic."""

from __future__ import annotations

import calendar
import re
from datetime import datetime, timedelta, timezone
from zoneinfo import ZoneInfo

from .errors import UnitParseError

# Physical suffixes have a fixed duration; calendar suffixes depend on where
# on the calendar (and in which zone) they are applied.
_PHYSICAL_SECONDS = {'s': 1, 'm': 60, 'h': 3600}
_CALENDAR_SUFFIXES = ('D', 'W', 'M', 'Y')
_UNIT_RE = re.compile(r'^([1-9][0-9]*)([smhDWMY])$')

UTC = timezone.utc


def timezonize(tz):
    """Return a tzinfo for a zone name, passing through tzinfo objects."""
    if hasattr(tz, 'utcoffset'):
        return tz
    if tz == 'UTC':
        return UTC
    try:
        return ZoneInfo(tz)
    except Exception:
        raise ValueError(f'unknown timezone "{tz}"') from None


def tz_name(tz) -> str:
    if tz is UTC or str(tz) == 'UTC':
        return 'UTC'
    return getattr(tz, 'key', str(tz))


def dt_from_t(t: float, tz) -> datetime:
    """Aware datetime for an epoch timestamp, rendered in tz."""
    return datetime.fromtimestamp(t, timezonize(tz))


def t_from_dt(dt: datetime) -> float:
    if dt.tzinfo is None:
        raise ValueError('naive datetimes are ambiguous here, attach a zone')
    return dt.timestamp()


def format_wallclock(t: float, tz) -> str:
    """Epoch as "YYYY-MM-DD HH:MM:SS +HH:MM" in the given zone."""
    dt = dt_from_t(t, tz)
    offset = dt.utcoffset() or timedelta(0)
    total = int(offset.total_seconds())
    sign = '+' if total >= 0 else '-'
    total = abs(total)
    return '{} {}{:02d}:{:02d}'.format(
        dt.strftime('%Y-%m-%d %H:%M:%S'), sign, total // 3600, (total % 3600) // 60)


class TimeUnit:
    """A length of time: physical (s, m, h) or calendar (D, W, M, Y).

    Physical units always last the same number of seconds. Calendar units
    cover a variable span: a "1D" unit lasts 23 hours on a DST spring-forward
    day and 25 on a fall-back day, so their duration is only defined given an
    anchor timestamp and a zone.

    Args:
        spec: a string like "1h", "615s", "1D". The count must be a positive
            integer and the suffix one of s, m, h, D, W, M, Y.
    """

    __slots__ = ('count', 'suffix')

    def __init__(self, spec: str):
        if isinstance(spec, TimeUnit):
            self.count, self.suffix = spec.count, spec.suffix
            return
        if not isinstance(spec, str):
            raise UnitParseError(f'time unit must be a string, got {type(spec).__name__}')
        match = _UNIT_RE.match(spec)
        if not match:
            raise UnitParseError(
                f'cannot parse time unit "{spec}": expected <positive integer>'
                f'<suffix> with suffix one of s, m, h, D, W, M, Y')
        self.count = int(match.group(1))
        self.suffix = match.group(2)

    @classmethod
    def from_seconds(cls, seconds) -> 'TimeUnit':
        if seconds <= 0 or seconds != int(seconds):
            raise UnitParseError(f'cannot express {seconds} seconds as a time unit')
        return cls(f'{int(seconds)}s')

    @property
    def is_calendar(self) -> bool:
        return self.suffix in _CALENDAR_SUFFIXES

    @property
    def is_physical(self) -> bool:
        return not self.is_calendar

    @property
    def seconds(self) -> float:
        """Fixed duration of a physical unit. Calendar units have none."""
        if self.is_calendar:
            raise ValueError(
                f'"{self}" is a calendar unit, its duration depends on the '
                f'anchor: use duration_at()')
        return float(self.count * _PHYSICAL_SECONDS[self.suffix])

    def duration_at(self, t: float, tz) -> float:
        """Seconds this unit spans when anchored at epoch t in tz."""
        if self.is_physical:
            return self.seconds
        return self.shift(t, tz) - t

    def shift(self, t: float, tz, times: int = 1) -> float:
        """Epoch t moved by this unit `times` times (negative moves back).

        Calendar shifts keep the local wall clock: one day after 12:00 is
        12:00 the next day even across a DST change. Ambiguous results take
        the earlier UTC offset; nonexistent ones advance past the gap.
        """
        if self.is_physical:
            return t + self.seconds * times
        tzinfo = timezonize(tz)
        dt = dt_from_t(t, tzinfo)
        n = self.count * times
        if self.suffix == 'D':
            moved = dt + timedelta(days=n)
        elif self.suffix == 'W':
            moved = dt + timedelta(weeks=n)
        elif self.suffix == 'M':
            moved = _shift_months(dt, n)
        else:
            moved = _shift_months(dt, 12 * n)
        # Rebuild to drop any fold inherited from dt, then resolve fold=0.
        moved = moved.replace(fold=0)
        return moved.timestamp()

    def floor(self, t: float, tz) -> float:
        """Epoch of the start of the unit boundary containing t.

        Physical units floor to epoch-aligned multiples in UTC. Calendar
        units floor to local midnight (D), the local Monday midnight (W),
        the first of the month (M) or January 1st (Y) in tz. Multi-count
        calendar units use the single-unit boundary.
        """
        if self.is_physical:
            step = self.seconds
            return t - (t % step)
        tzinfo = timezonize(tz)
        dt = dt_from_t(t, tzinfo)
        if self.suffix == 'D':
            anchor = dt.replace(hour=0, minute=0, second=0, microsecond=0)
        elif self.suffix == 'W':
            monday = dt.date() - timedelta(days=dt.weekday())
            anchor = datetime(monday.year, monday.month, monday.day, tzinfo=tzinfo)
        elif self.suffix == 'M':
            anchor = dt.replace(day=1, hour=0, minute=0, second=0, microsecond=0)
        else:
            anchor = dt.replace(month=1, day=1, hour=0, minute=0, second=0, microsecond=0)
        anchor = anchor.replace(fold=0)
        return anchor.timestamp()

    def __str__(self):
        return f'{self.count}{self.suffix}'

    def __repr__(self):
        return f'TimeUnit(\'{self}\')'

    def __eq__(self, other):
        if isinstance(other, str):
            try:
                other = TimeUnit(other)
            except UnitParseError:
                return NotImplemented
        if not isinstance(other, TimeUnit):
            return NotImplemented
        if self.is_physical and other.is_physical:
            return self.seconds == other.seconds
        return (self.count, self.suffix) == (other.count, other.suffix)

    def __hash__(self):
        if self.is_physical:
            return hash(('physical', self.seconds))
        return hash((self.count, self.suffix))


def _shift_months(dt: datetime, months: int) -> datetime:
    month_index = dt.year * 12 + (dt.month - 1) + months
    year, month = divmod(month_index, 12)
    month += 1
    day = min(dt.day, calendar.monthrange(year, month)[1])
    return dt.replace(year=year, month=month, day=day)
