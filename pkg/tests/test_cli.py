"""End-to-end checks for the command line interface.

Every test goes through a real subprocess: the CLI configures the root
logger on startup, and doing that in-process would wreck the handlers
pytest installs for log capture. Output files written by the CLI are
compared byte-for-byte against files written by the equivalent library
calls, so the commands cannot drift from the library behavior.
"""

import os
import subprocess
import sys

import pytest

from chronoseries import io as series_io
from chronoseries import ops as series_ops
from chronoseries import transform
from chronoseries.models import PeriodicAverageForecaster

from support import point_series


PATTERN = [10.0, 20.0, 30.0, 25.0, 15.0, 5.0]

PNG_MAGIC = b'\x89PNG\r\n\x1a\n'


def run_cli(*args, stdin_text=None):
    return subprocess.run(
        [sys.executable, '-m', 'chronoseries.cli', *[str(a) for a in args]],
        input=stdin_text, capture_output=True, text=True, timeout=120)


def write_csv(path, values, start=0, step=3600, header='epoch,value'):
    lines = [header]
    for i, value in enumerate(values):
        lines.append(f'{start + i * step},{value}')
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


def periodic_csv(path, cycles=4):
    return write_csv(path, PATTERN * cycles)


def error_line(result):
    """The final stderr line, where the CLI reports its failure."""
    lines = [line for line in result.stderr.splitlines() if line]
    assert lines, f'no stderr at all (stdout: {result.stdout!r})'
    return lines[-1]


class TestInfo:

    def test_prints_summary_line(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0, 3.0])
        result = run_cli('info', tmp_path / 'in.csv')
        assert result.returncode == 0
        assert result.stdout.startswith('Time series of #3 points')
        assert 'from point @ 0.0' in result.stdout

    def test_reads_native_input(self, tmp_path):
        series = point_series([1.0, 2.0], step=3600.0)
        series_io.save(series, str(tmp_path / 'in.nsv'))
        result = run_cli('info', tmp_path / 'in.nsv')
        assert result.returncode == 0
        assert result.stdout.startswith('Time series of #2 points')

    def test_tz_changes_display(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0])
        result = run_cli('info', tmp_path / 'in.csv', '--tz', 'Europe/Rome')
        assert result.returncode == 0
        assert '+01:00' in result.stdout


class TestResample:

    def test_output_matches_library_byte_for_byte(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [3, 4, 5, 6, 7, 8, 9], step=600)
        out = tmp_path / 'out.nsv'
        result = run_cli('resample', tmp_path / 'in.csv', '--unit', '30m',
                         '--out', out)
        assert result.returncode == 0

        expected = transform.resample(
            series_io.from_csv(str(tmp_path / 'in.csv')), '30m')
        reference = tmp_path / 'reference.nsv'
        series_io.save(expected, str(reference))
        assert out.read_bytes() == reference.read_bytes()

    def test_csv_extension_selects_csv_output(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0, 3.0], step=600)
        out = tmp_path / 'out.csv'
        result = run_cli('resample', tmp_path / 'in.csv', '--unit', '10m',
                         '--out', out)
        assert result.returncode == 0
        assert out.read_text(encoding='utf-8').splitlines()[0] == 'epoch,value'

    def test_reports_written_file(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0, 3.0], step=600)
        out = tmp_path / 'out.nsv'
        result = run_cli('resample', tmp_path / 'in.csv', '--unit', '10m',
                         '--out', out)
        assert f'[INFO] Written {out}' in result.stderr

    def test_log_level_warning_silences_info(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0, 3.0], step=600)
        result = run_cli('--log-level', 'warning', 'resample',
                         tmp_path / 'in.csv', '--unit', '10m',
                         '--out', tmp_path / 'out.nsv')
        assert result.returncode == 0
        assert '[INFO]' not in result.stderr

    def test_leaves_no_scratch_files(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0, 3.0], step=600)
        result = run_cli('resample', tmp_path / 'in.csv', '--unit', '10m',
                         '--out', tmp_path / 'out.nsv')
        assert result.returncode == 0
        assert sorted(os.listdir(tmp_path)) == ['in.csv', 'out.nsv']


class TestAggregate:

    def test_multi_op_output_matches_library(self, tmp_path):
        write_csv(tmp_path / 'in.csv', range(48), step=3600)
        out = tmp_path / 'out.nsv'
        result = run_cli('aggregate', tmp_path / 'in.csv', '--unit', '1D',
                         '--ops', 'min,max,avg', '--out', out)
        assert result.returncode == 0

        expected = transform.aggregate(
            series_io.from_csv(str(tmp_path / 'in.csv')), '1D',
            operations=['min', 'max', 'avg'])
        reference = tmp_path / 'reference.nsv'
        series_io.save(expected, str(reference))
        assert out.read_bytes() == reference.read_bytes()

        loaded = series_io.load(str(out))
        assert loaded.labels == ['value_min', 'value_max', 'value_avg']

    def test_default_operation_is_average(self, tmp_path):
        write_csv(tmp_path / 'in.csv', range(24), step=3600)
        out = tmp_path / 'out.nsv'
        result = run_cli('aggregate', tmp_path / 'in.csv', '--unit', '1D',
                         '--out', out)
        assert result.returncode == 0
        loaded = series_io.load(str(out))
        assert loaded.labels == ['value']
        assert loaded[0].data['value'] == pytest.approx(11.5)

    def test_tz_drives_calendar_boundaries(self, tmp_path):
        # Same epochs, different zone: slot starts follow local midnight.
        start = 1559340000  # 2019-06-01 00:00 Europe/Rome
        write_csv(tmp_path / 'in.csv', range(73), start=start, step=3600)
        out = tmp_path / 'out.nsv'
        result = run_cli('aggregate', tmp_path / 'in.csv', '--unit', '1D',
                         '--tz', 'Europe/Rome', '--out', out)
        assert result.returncode == 0
        loaded = series_io.load(str(out))
        assert len(loaded) == 2
        assert loaded[0].start == float(start)


class TestOps:

    def test_chain_matches_library(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [5, 1, 8, 2, 9, 4, 7], step=600)
        out = tmp_path / 'out.nsv'
        result = run_cli('ops', tmp_path / 'in.csv', '--apply', 'normalize',
                         '--apply', 'mavg:3', '--out', out)
        assert result.returncode == 0

        expected = series_ops.mavg(
            series_ops.normalize(series_io.from_csv(str(tmp_path / 'in.csv'))), 3)
        reference = tmp_path / 'reference.nsv'
        series_io.save(expected, str(reference))
        assert out.read_bytes() == reference.read_bytes()

    def test_comma_list_equals_repeated_flags(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [5, 1, 8, 2, 9, 4, 7], step=600)
        first = tmp_path / 'first.nsv'
        second = tmp_path / 'second.nsv'
        assert run_cli('ops', tmp_path / 'in.csv', '--apply', 'normalize',
                       '--apply', 'mavg:3', '--out', first).returncode == 0
        assert run_cli('ops', tmp_path / 'in.csv', '--apply', 'normalize,mavg:3',
                       '--out', second).returncode == 0
        assert first.read_bytes() == second.read_bytes()

    def test_filter_and_offset(self, tmp_path):
        path = tmp_path / 'in.csv'
        path.write_text('epoch,temp,hum\n0,20.0,55.0\n600,21.0,54.0\n',
                        encoding='utf-8')
        out = tmp_path / 'out.nsv'
        result = run_cli('ops', path, '--apply', 'filter:temp,offset:-2',
                         '--out', out)
        assert result.returncode == 0
        loaded = series_io.load(str(out))
        assert loaded.labels == ['temp']
        assert loaded[0].data['temp'] == 18.0

    def test_unknown_operation(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0], step=600)
        result = run_cli('ops', tmp_path / 'in.csv', '--apply', 'frobnicate',
                         '--out', tmp_path / 'out.nsv')
        assert result.returncode == 1
        assert error_line(result).startswith(
            'error: value: unknown operation "frobnicate"')

    def test_mavg_needs_window_argument(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0], step=600)
        result = run_cli('ops', tmp_path / 'in.csv', '--apply', 'mavg',
                         '--out', tmp_path / 'out.nsv')
        assert result.returncode == 1
        assert error_line(result).startswith('error: value: mavg needs a window')


class TestModelCommands:

    def test_forecast_continues_the_cycle(self, tmp_path):
        periodic_csv(tmp_path / 'in.csv')
        out = tmp_path / 'out.nsv'
        result = run_cli('forecast', tmp_path / 'in.csv', '--periodicity', '6',
                         '--steps', '6', '--out', out)
        assert result.returncode == 0
        loaded = series_io.load(str(out))
        assert len(loaded) == 30
        tail = [element.data['value'] for element in loaded[24:]]
        assert tail == PATTERN
        assert all(element.indexes['forecast'] == 1.0
                   for element in loaded[24:])

    def test_fit_save_then_reuse_is_identical(self, tmp_path):
        periodic_csv(tmp_path / 'in.csv')
        model_path = tmp_path / 'model.csm'
        first = tmp_path / 'first.nsv'
        second = tmp_path / 'second.nsv'
        result = run_cli('forecast', tmp_path / 'in.csv', '--periodicity', '6',
                         '--steps', '6', '--fit-save', model_path,
                         '--out', first)
        assert result.returncode == 0
        assert f'[INFO] Model saved to {model_path}' in result.stderr
        header = model_path.read_text(encoding='utf-8').splitlines()[0]
        assert header == '# cs-model v1'

        result = run_cli('forecast', tmp_path / 'in.csv',
                         '--model', model_path, '--steps', '6',
                         '--out', second)
        assert result.returncode == 0
        assert first.read_bytes() == second.read_bytes()

    def test_forecast_matches_library(self, tmp_path):
        periodic_csv(tmp_path / 'in.csv')
        out = tmp_path / 'out.nsv'
        assert run_cli('forecast', tmp_path / 'in.csv', '--periodicity', '6',
                       '--steps', '3', '--out', out).returncode == 0

        series = series_io.from_csv(str(tmp_path / 'in.csv'))
        model = PeriodicAverageForecaster()
        model.fit(series, periodicity=6)
        reference = tmp_path / 'reference.nsv'
        series_io.save(model.apply(series, steps=3), str(reference))
        assert out.read_bytes() == reference.read_bytes()

    def test_reconstruct_fills_the_hole(self, tmp_path):
        values = PATTERN * 4
        values[9] = -77.0  # behind a full loss, must not leak through
        losses = [0.0] * 24
        losses[9] = 1.0
        series = point_series(values, step=3600.0, losses=losses)
        series_io.save(series, str(tmp_path / 'in.nsv'))

        out = tmp_path / 'out.nsv'
        result = run_cli('reconstruct', tmp_path / 'in.nsv',
                         '--periodicity', '6', '--out', out)
        assert result.returncode == 0
        loaded = series_io.load(str(out))
        assert loaded[9].data['value'] == PATTERN[3]
        assert loaded[9].indexes['data_reconstructed'] == 1.0

    def test_detect_anomalies_marks_elements(self, tmp_path):
        values = PATTERN * 4
        values[15] += 80.0
        write_csv(tmp_path / 'in.csv', values)
        out = tmp_path / 'out.nsv'
        result = run_cli('detect-anomalies', tmp_path / 'in.csv',
                         '--periodicity', '6', '--out', out)
        assert result.returncode == 0
        assert '[INFO] Anomaly index computed on 18 of 24 elements' \
            in result.stderr
        loaded = series_io.load(str(out))
        indexes = [element.indexes['anomaly'] for element in loaded
                   if 'anomaly' in element.indexes]
        assert len(indexes) == 18
        assert all(0.0 <= index <= 1.0 for index in indexes)
        assert max(indexes) == 1.0

    def test_unknown_model_kind(self, tmp_path):
        periodic_csv(tmp_path / 'in.csv')
        result = run_cli('forecast', tmp_path / 'in.csv', '--model', 'nope',
                         '--periodicity', '6', '--out', tmp_path / 'out.nsv')
        assert result.returncode == 1
        assert error_line(result).startswith('error: value: unknown model "nope"')

    def test_oversized_window_is_a_window_error(self, tmp_path):
        periodic_csv(tmp_path / 'in.csv')
        result = run_cli('forecast', tmp_path / 'in.csv', '--periodicity', '6',
                         '--window', '99', '--out', tmp_path / 'out.nsv')
        assert result.returncode == 1
        assert error_line(result).startswith('error: window:')
        assert not (tmp_path / 'out.nsv').exists()


class TestPlot:

    def test_html_and_image_in_one_run(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1, 5, 2, 8, 3], step=600)
        html = tmp_path / 'chart.html'
        image = tmp_path / 'chart.png'
        result = run_cli('plot', tmp_path / 'in.csv', '--html', html,
                         '--image', image)
        assert result.returncode == 0
        page = html.read_text(encoding='utf-8')
        assert page.count('id="chart-data"') == 1
        assert image.read_bytes().startswith(PNG_MAGIC)

    def test_max_points_triggers_aggregation(self, tmp_path):
        write_csv(tmp_path / 'in.csv', range(101), step=600)
        result = run_cli('plot', tmp_path / 'in.csv', '--max-points', '50',
                         '--html', tmp_path / 'chart.html')
        assert result.returncode == 0
        assert '[INFO] Aggregating by "10" for improved plotting' \
            in result.stderr

    def test_requires_a_target(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0], step=600)
        result = run_cli('plot', tmp_path / 'in.csv')
        assert result.returncode == 1
        assert error_line(result).startswith(
            'error: value: pass --html and/or --image')


class TestConvert:

    def test_csv_becomes_native_by_default(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0, 3.0], step=600)
        out = tmp_path / 'out.nsv'
        result = run_cli('convert', tmp_path / 'in.csv', '--out', out)
        assert result.returncode == 0
        first = out.read_text(encoding='utf-8').splitlines()[0]
        assert first == '# chronoseries v1'

    def test_native_becomes_csv_by_default(self, tmp_path):
        series = point_series([1.5, 2.5], step=600.0)
        series_io.save(series, str(tmp_path / 'in.nsv'))
        out = tmp_path / 'out.data'
        result = run_cli('convert', tmp_path / 'in.nsv', '--out', out)
        assert result.returncode == 0
        lines = out.read_text(encoding='utf-8').splitlines()
        assert lines[0] == 'epoch,value'
        assert lines[1] == '0.0,1.5'

    def test_format_override_wins(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0], step=600)
        out = tmp_path / 'out.data'
        result = run_cli('convert', tmp_path / 'in.csv', '--format', 'csv',
                         '--out', out)
        assert result.returncode == 0
        assert out.read_text(encoding='utf-8').splitlines()[0] == 'epoch,value'

    def test_round_trip_preserves_the_series(self, tmp_path):
        series = point_series([1.0, 2.5, -3.25], step=600.0, label='signal')
        series_io.save(series, str(tmp_path / 'a.nsv'))
        assert run_cli('convert', tmp_path / 'a.nsv',
                       '--out', tmp_path / 'b.csv').returncode == 0
        assert run_cli('convert', tmp_path / 'b.csv',
                       '--out', tmp_path / 'c.nsv').returncode == 0
        restored = series_io.load(str(tmp_path / 'c.nsv'))
        assert [element.data['signal'] for element in restored] \
            == [1.0, 2.5, -3.25]

    def test_stdin_to_stdout(self):
        result = run_cli('convert', '-', '--out', '-',
                         stdin_text='epoch,value\n0,1.0\n600,2.0\n')
        assert result.returncode == 0
        assert result.stdout.startswith('# chronoseries v1')

    def test_native_stdin_flips_to_csv(self, tmp_path):
        series = point_series([4.0, 5.0], step=600.0)
        series_io.save(series, str(tmp_path / 'in.nsv'))
        text = (tmp_path / 'in.nsv').read_text(encoding='utf-8')
        result = run_cli('convert', '-', '--out', '-', stdin_text=text)
        assert result.returncode == 0
        assert result.stdout.splitlines()[0] == 'epoch,value'


class TestFailureShape:

    def test_missing_input_file(self, tmp_path):
        result = run_cli('info', tmp_path / 'nope.csv')
        assert result.returncode == 1
        lines = result.stderr.splitlines()
        assert len(lines) == 1
        assert lines[0].startswith('error: not-found:')

    def test_bad_unit_fails_and_writes_nothing(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0], step=600)
        out = tmp_path / 'out.nsv'
        result = run_cli('resample', tmp_path / 'in.csv', '--unit', '1q',
                         '--out', out)
        assert result.returncode == 1
        assert error_line(result).startswith('error: unit-parse:')
        assert not out.exists()
        assert not [name for name in os.listdir(tmp_path)
                    if name.startswith('.part.')]

    def test_calendar_resample_is_a_resolution_error(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0, 3.0], step=3600)
        result = run_cli('resample', tmp_path / 'in.csv', '--unit', '1D',
                         '--out', tmp_path / 'out.nsv')
        assert result.returncode == 1
        assert error_line(result).startswith('error: resolution:')

    def test_broken_csv_cites_the_line(self, tmp_path):
        (tmp_path / 'in.csv').write_text(
            'epoch,value\n0,1.0\n600,broken\n', encoding='utf-8')
        result = run_cli('info', tmp_path / 'in.csv')
        assert result.returncode == 1
        assert error_line(result).startswith('error: csv:')
        assert 'line 3' in error_line(result)

    def test_missing_required_flag_is_a_usage_error(self, tmp_path):
        write_csv(tmp_path / 'in.csv', [1.0, 2.0], step=600)
        result = run_cli('resample', tmp_path / 'in.csv',
                         '--out', tmp_path / 'out.nsv')
        assert result.returncode == 2
        assert error_line(result).startswith('error: usage:')

    def test_unknown_command_is_a_usage_error(self):
        result = run_cli('transmogrify', 'whatever.csv')
        assert result.returncode == 2
        assert error_line(result).startswith('error: usage:')
