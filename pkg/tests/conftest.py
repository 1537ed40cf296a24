import numpy as np
import pytest

from config import config as app_config
from models.feature_matrix import FeatureMatrix
from services.csv_ingestor import CsvIngestor
from services.synthesizer import synthesize, synthesize_municipalities


def matrix_of(values, prefix='r'):
    """FeatureMatrix with generated ids and column names"""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    return FeatureMatrix(
        values=values,
        row_ids=[f"{prefix}{i}" for i in range(values.shape[0])],
        column_names=[f"c{j}" for j in range(values.shape[1])],
    )


@pytest.fixture
def config():
    return app_config


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def three_blobs():
    """150 points in three tight, well separated groups"""
    return synthesize(seed=7, n=150, planted_k=3, separation=50.0, noise_fraction=0.0, sd=1.0)


@pytest.fixture
def ingestor(config):
    return CsvIngestor(config)


@pytest.fixture
def municipality_csv(tmp_path, ingestor):
    """Schema-shaped CSV of 40 synthetic municipalities in three profiles"""
    records, _ = synthesize_municipalities(seed=3, n=40, planted_k=3)
    return ingestor.write_csv(records, tmp_path / 'municipalities.csv')


HEADER = ('NAME,MHR,POPULATION,DEMOGDENSITY,IDEB2005,IDEB2007,IDEB2009,IDEB2011,IDEB2013,'
          'LIFEEXPECT,GINI,INRICHEST10,EDUCLEVEL,MHDI,MHDIE,MHDIL,MHDII')

ROWS = (
    'Goiania,2890,1302001,1776.74,4.1,4.3,4.9,5.2,5.6,75.8,0.58,47.1,61.2,0.799,0.739,0.838,0.824',
    'Anapolis,760,334613,358.58,3.9,4.2,4.7,5.0,5.3,75.1,0.51,40.3,52.8,0.737,0.675,0.835,0.707',
    'Rio Verde,310,176424,21.05,4.0,4.4,4.8,5.1,5.6,75.4,0.52,41.2,49.9,0.754,0.672,0.848,0.751',
)


@pytest.fixture
def write_csv_text(tmp_path):
    """Write raw CSV text to a temporary file and return its path"""
    def write(text, name='input.csv'):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return path
    return write


@pytest.fixture
def small_csv(write_csv_text):
    return write_csv_text('\n'.join((HEADER,) + ROWS) + '\n')
