"""Points, slots and the TimeSeries container."""

from datetime import datetime, timezone

import pytest

from chronoseries import (VARIABLE, ConsistencyError, DataTimePoint,
                          DataTimeSlot, TimeSeries, TimeUnit)
from support import point_series, slot_series


class TestDataTimePoint:

    def test_basic_construction(self):
        p = DataTimePoint(60.0, {'temperature': 21.5})
        assert p.t == 60.0
        assert p.data == {'temperature': 21.5}
        assert p.indexes == {}

    def test_values_coerced_to_float(self):
        p = DataTimePoint(0, {'n': 3})
        assert isinstance(p.t, float)
        assert isinstance(p.data['n'], float)

    def test_indexes_accepted_in_range(self):
        p = DataTimePoint(0, {'v': 1}, indexes={'data_loss': 0.25, 'anomaly': 1})
        assert p.indexes == {'data_loss': 0.25, 'anomaly': 1.0}

    @pytest.mark.parametrize('indexes', [{'data_loss': 1.5}, {'data_loss': -0.1},
                                         {'data_loss': 'high'}, {'': 0.5},
                                         {'a,b': 0.5}])
    def test_bad_indexes_rejected(self, indexes):
        with pytest.raises(ConsistencyError):
            DataTimePoint(0, {'v': 1}, indexes=indexes)

    @pytest.mark.parametrize('data', [{}, None, {'v': 'x'}, {'v': float('nan')},
                                      {3: 1.0}, {'a,b': 1.0}, 'not-a-dict',
                                      {'v': True}])
    def test_bad_data_rejected(self, data):
        with pytest.raises(ConsistencyError):
            DataTimePoint(0, data)

    def test_non_numeric_timestamp_rejected(self):
        with pytest.raises(ConsistencyError):
            DataTimePoint('noon', {'v': 1})

    def test_immutable(self):
        p = DataTimePoint(0, {'v': 1})
        with pytest.raises(AttributeError):
            p.t = 10.0
        with pytest.raises(AttributeError):
            p.extra = 'nope'

    def test_equality(self):
        assert DataTimePoint(5, {'v': 1}) == DataTimePoint(5.0, {'v': 1.0})
        assert DataTimePoint(5, {'v': 1}) != DataTimePoint(5, {'v': 2})
        assert DataTimePoint(5, {'v': 1}) != DataTimePoint(6, {'v': 1})
        assert DataTimePoint(5, {'v': 1}, {'data_loss': 0.5}) != DataTimePoint(5, {'v': 1})


class TestDataTimeSlot:

    def test_basic_construction(self):
        s = DataTimeSlot(0.0, 3600.0, {'v': 2.0}, unit='1h')
        assert s.start == 0.0
        assert s.end == 3600.0
        assert s.t == 0.0  # representative timestamp is the start
        assert s.duration == 3600.0
        assert s.unit == TimeUnit('1h')

    def test_unit_optional(self):
        assert DataTimeSlot(0, 60, {'v': 1}).unit is None

    def test_end_must_follow_start(self):
        with pytest.raises(ConsistencyError):
            DataTimeSlot(100, 100, {'v': 1})
        with pytest.raises(ConsistencyError):
            DataTimeSlot(100, 50, {'v': 1})

    def test_immutable(self):
        s = DataTimeSlot(0, 60, {'v': 1})
        with pytest.raises(AttributeError):
            s.end = 120


class TestSeriesConstruction:

    def test_empty(self):
        series = TimeSeries()
        assert len(series) == 0
        assert not series
        assert series.kind == 'empty'
        assert series.labels == []
        assert series.summarize() == 'empty time series'

    def test_points(self):
        series = point_series([1, 2, 3])
        assert len(series) == 3
        assert series.kind == 'points'
        assert series.labels == ['value']
        assert bool(series)

    def test_mixed_kinds_rejected(self):
        with pytest.raises(ConsistencyError):
            TimeSeries([DataTimePoint(0, {'v': 1}),
                        DataTimeSlot(600, 1200, {'v': 1})])

    def test_unsorted_points_rejected(self):
        with pytest.raises(ConsistencyError):
            TimeSeries([DataTimePoint(600, {'v': 1}), DataTimePoint(0, {'v': 2})])

    def test_duplicate_timestamps_rejected(self):
        with pytest.raises(ConsistencyError):
            TimeSeries([DataTimePoint(0, {'v': 1}), DataTimePoint(0, {'v': 2})])

    def test_label_mismatch_rejected(self):
        with pytest.raises(ConsistencyError):
            TimeSeries([DataTimePoint(0, {'a': 1}), DataTimePoint(600, {'b': 2})])

    def test_slots_must_be_dense(self):
        a = DataTimeSlot(0, 3600, {'v': 1}, unit='1h')
        gap = DataTimeSlot(7200, 10800, {'v': 2}, unit='1h')
        with pytest.raises(ConsistencyError):
            TimeSeries([a, gap])

    def test_slot_units_must_agree(self):
        a = DataTimeSlot(0, 3600, {'v': 1}, unit='1h')
        b = DataTimeSlot(3600, 5400, {'v': 2}, unit='30m')
        with pytest.raises(ConsistencyError):
            TimeSeries([a, b])

    def test_non_element_rejected(self):
        with pytest.raises(ConsistencyError):
            TimeSeries([42])


class TestResolution:

    def test_even_points_detect_a_unit(self):
        series = point_series([1, 2, 3], step=3600.0)
        assert isinstance(series.resolution, TimeUnit)
        assert series.resolution == TimeUnit('1h')

    def test_uneven_points_are_variable(self):
        elements = [DataTimePoint(t, {'v': 1}) for t in (0, 600, 1300, 1900)]
        series = TimeSeries(elements)
        assert series.resolution is VARIABLE

    def test_declared_spelling_is_kept(self):
        series = point_series([1, 2, 3], step=3600.0, resolution='1h')
        assert str(series.resolution) == '1h'

    def test_slots_take_their_unit(self):
        series = slot_series([1, 2, 3], unit='1D', tz='Europe/Rome',
                             start=datetime(2019, 3, 30,
                                            tzinfo=timezone.utc).timestamp())
        assert series.resolution == TimeUnit('1D')

    def test_single_point_has_no_resolution(self):
        assert point_series([1]).resolution is None

    def test_auto_interval_prefers_the_mode(self):
        # Deltas 600,600,615,630: 600 repeats, so it wins over the median.
        elements = [DataTimePoint(t, {'v': 1}) for t in (0, 600, 1200, 1815, 2445)]
        assert TimeSeries(elements).auto_interval() == 600.0

    def test_auto_interval_falls_back_to_median(self):
        elements = [DataTimePoint(t, {'v': 1}) for t in (0, 100, 400, 1000)]
        assert TimeSeries(elements).auto_interval() == 300.0

    def test_auto_interval_needs_two_elements(self):
        with pytest.raises(ConsistencyError):
            point_series([1]).auto_interval()


class TestAccess:

    def test_positional_and_negative(self):
        series = point_series([10, 20, 30])
        assert series[0].data['value'] == 10.0
        assert series[-1].data['value'] == 30.0

    def test_by_timestamp(self):
        series = point_series([10, 20, 30], start=0.0, step=600.0)
        assert series[600.0].data['value'] == 20.0
        with pytest.raises(KeyError):
            series[601.0]

    def test_by_datetime(self):
        series = point_series([10, 20], start=0.0, step=600.0)
        dt = datetime(1970, 1, 1, 0, 10, tzinfo=timezone.utc)
        assert series[dt].data['value'] == 20.0

    def test_by_label_filters(self):
        series = TimeSeries([DataTimePoint(0, {'a': 1, 'b': 2}),
                             DataTimePoint(600, {'a': 3, 'b': 4})])
        only_a = series['a']
        assert only_a.labels == ['a']
        assert [e.data['a'] for e in only_a] == [1.0, 3.0]

    def test_positional_slice(self):
        series = point_series([1, 2, 3, 4])
        part = series[1:3]
        assert isinstance(part, TimeSeries)
        assert [e.data['value'] for e in part] == [2.0, 3.0]

    def test_time_slice_is_half_open(self):
        series = point_series([1, 2, 3, 4], start=0.0, step=600.0)
        part = series[600.0:1800.0]
        assert [e.t for e in part] == [600.0, 1200.0]

    def test_slice_method_matches_brackets(self):
        series = point_series([1, 2, 3, 4], start=0.0, step=600.0)
        assert series.slice(600.0, 1800.0) == series[600.0:1800.0]
        assert series.slice(1, 3) == series[1:3]

    def test_slice_keeps_resolution(self):
        series = point_series([1, 2, 3, 4], step=3600.0, resolution='1h')
        assert str(series[1:3].resolution) == '1h'

    def test_step_slicing_unsupported(self):
        with pytest.raises(ValueError):
            point_series([1, 2, 3, 4])[::2]

    def test_bool_index_rejected(self):
        with pytest.raises(TypeError):
            point_series([1, 2])[True]

    def test_filter_unknown_label(self):
        with pytest.raises(KeyError):
            point_series([1, 2]).filter('nope')

    def test_index_names_in_first_seen_order(self):
        series = TimeSeries([
            DataTimePoint(0, {'v': 1}, {'data_loss': 0.0}),
            DataTimePoint(600, {'v': 2}, {'data_loss': 1.0, 'anomaly': 0.3}),
        ])
        assert series.index_names == ['data_loss', 'anomaly']


class TestAppendAndZones:

    def test_append_returns_new_series(self):
        series = point_series([1, 2])
        grown = series.append(DataTimePoint(1200, {'value': 3}))
        assert len(series) == 2
        assert len(grown) == 3

    def test_append_out_of_order_rejected(self):
        series = point_series([1, 2])
        with pytest.raises(ConsistencyError):
            series.append(DataTimePoint(0, {'value': 9}))

    def test_append_keeps_declared_resolution_spelling(self):
        series = point_series([1, 2], step=3600.0, resolution='1h')
        grown = series.append(DataTimePoint(7200, {'value': 3}))
        assert str(grown.resolution) == '1h'

    def test_change_tz_keeps_epochs(self):
        series = point_series([1, 2, 3], start=1546477200.0, step=3600.0)
        moved = series.change_tz('Europe/Rome')
        assert moved.tz == 'Europe/Rome'
        assert [e.t for e in moved] == [e.t for e in series]
        assert moved.resolution == series.resolution

    def test_change_tz_affects_equality(self):
        series = point_series([1, 2])
        assert series != series.change_tz('Europe/Rome')
        assert series == series.change_tz('UTC')

    def test_unknown_tz_rejected(self):
        with pytest.raises(ValueError):
            point_series([1, 2]).change_tz('Nowhere/Void')


class TestSummarize:

    def test_point_series_line(self):
        series = point_series([1, 2, 3], start=0.0, step=3600.0)
        text = series.summarize()
        assert text == ('Time series of #3 points at 3600s resolution, '
                        'from point @ 0.0 (1970-01-01 00:00:00 +00:00) '
                        'to point @ 7200.0 (1970-01-01 02:00:00 +00:00)')

    def test_variable_resolution_mentions_the_interval(self):
        elements = [DataTimePoint(t, {'v': 1}) for t in (0, 600, 1200, 1815, 2445)]
        text = TimeSeries(elements).summarize()
        assert 'variable resolution (~600s)' in text

    def test_str_is_the_summary(self):
        series = point_series([1, 2])
        assert str(series) == series.summarize()
