import os

import pytest

from chronoseries import from_csv

DATA_DIR = os.path.join(os.path.dirname(__file__), 'data')


@pytest.fixture(scope='session')
def humitemp_path():
    return os.path.join(DATA_DIR, 'humitemp.csv')


@pytest.fixture(scope='session')
def humitemp(humitemp_path):
    # One parse for the whole run; the fixture file has 14000 rows.
    return from_csv(humitemp_path)
