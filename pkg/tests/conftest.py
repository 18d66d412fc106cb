import json

import numpy as np
import pytest

from photodistill.extraction import CorrelatorSet, Protocol, SampleStats
from photodistill.resources.sources import DATA_DIR
from photodistill.utils import read_count_csv, read_loss_file

R1 = 0.497
R2 = 0.517

# per-protocol statistics of the calibration runs
TABLE_STATS = {
    Protocol.A: SampleStats(n=21, mean=0.0592, sd=0.0038, se=0.0008),
    Protocol.B: SampleStats(n=21, mean=0.1276, sd=0.0036, se=0.0008),
    Protocol.C: SampleStats(n=80, mean=0.104, sd=0.045, se=0.005),
    Protocol.D: SampleStats(n=80, mean=0.131, sd=0.021, se=0.002),
}

D_IN = [0.3568, 0.3242, 0.3991, 0.3909]
D_OUT = [0.3856, 0.4110, 0.4046, 0.3734]

U_MODEL_ABS = np.array([
    [0.5998, 0.5735, 0.4012, 0.3879],
    [0.5546, 0.6118, 0.4055, 0.3921],
    [0.5768, 0.5448, 0.4376, 0.4231],
    [0.0, 0.0, 0.6951, 0.7189],
])


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def table_stats():
    return dict(TABLE_STATS)


@pytest.fixture
def correlator_set():
    return CorrelatorSet.from_stats(TABLE_STATS, R1, R2)


@pytest.fixture
def chip():
    return read_loss_file(DATA_DIR / "characterized_chip.json")


@pytest.fixture
def u_d_exp(chip):
    return chip.u_d.to_array()


@pytest.fixture
def u_d_th():
    w = np.exp(-2j * np.pi / 3)
    return np.array([[1, 1, 1], [1, w, w * w], [1, w * w, w]]) / np.sqrt(3)


@pytest.fixture
def chip_counts():
    return read_count_csv(DATA_DIR / "s_recorded.csv")


@pytest.fixture
def reference_counts():
    return read_count_csv(DATA_DIR / "s_recorded_ref.csv")


@pytest.fixture
def write_json(tmp_path):
    def _write(name, payload):
        p = tmp_path / name
        p.write_text(json.dumps(payload), encoding="utf-8")
        return p

    return _write
