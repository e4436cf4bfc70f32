"""chronoseries: calendar-aware time series processing.

Points and slots with per-element quality indexes, physical and calendar
time units with honest DST arithmetic, coverage-aware resampling and
aggregation, resolution-preserving operations, a small model framework
(forecasting, gap reconstruction, anomaly detection) and self-contained
plotting, all behind one CLI.
"""

from .core import (KNOWN_INDEXES, VARIABLE, DataTimePoint, DataTimeSlot,
                   TimeSeries, detect_resolution)
from .errors import (ChronoseriesError, ConsistencyError, CsvError, FormatError,
                     NotFittedError, ResolutionError, UnitParseError, WindowError)
from .io import from_csv, load, save, to_csv
from .timeunit import TimeUnit, timezonize
from .transform import aggregate, resample

__version__ = '0.1.0'

__all__ = ['KNOWN_INDEXES', 'VARIABLE', 'ChronoseriesError', 'ConsistencyError',
           'CsvError', 'DataTimePoint', 'DataTimeSlot', 'FormatError',
           'NotFittedError', 'ResolutionError', 'TimeSeries', 'TimeUnit',
           'UnitParseError', 'WindowError', 'aggregate', 'detect_resolution',
           'from_csv', 'load', 'resample', 'save', 'timezonize', 'to_csv']
