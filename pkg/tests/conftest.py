import numpy as np
import pytest

import awd


@pytest.fixture
def grid64():
    return awd.make_grid(2, [64, 64], [63.0, 63.0])


@pytest.fixture
def grid32():
    return awd.make_grid(2, [32, 32], [31.0, 31.0])


def random_field(grid, seed):
    rng = np.random.default_rng(seed)
    return awd.ScalarField(grid, rng.normal(size=grid.shape))


def tiny_dataset_spec(count=4, master_seed=7, split="train", snapshots=False,
                      snapshot_every=0, epicenter=(-5.0, 5.0)):
    """A fast 32x32 constant-medium dataset used across dataset/cli tests."""
    return awd.DatasetSpec(
        count=count,
        master_seed=master_seed,
        split_name=split,
        grid={"ndim": 2, "points": [32, 32], "extent": [31.0, 31.0]},
        medium={"preset": "constant", "c": 300.0},
        source={
            "wavelet": {"kind": "ricker", "f0": 20.0, "tau_w": 0.0, "t0": 0.05},
            "sigma": 1.5,
        },
        sim={"duration": 0.25, "dt": "auto", "cfl_safety": 0.5, "alpha": 0.0,
             "boundary": "dirichlet", "sponge_width": 8, "sponge_strength": 3.0,
             "snapshot_every": snapshot_every},
        rate=100.0,
        interrogators=(
            {"id": "g0", "position": (-8.0, 0.0)},
            {"id": "g1", "position": (8.0, 0.0)},
        ),
        epicenter_ranges=(tuple(epicenter), tuple(epicenter)),
        amplitude_range=(1.0, 1.0),
        f0_range=(15.0, 25.0),
        epicenter_margin=3.0,
        snapshots=snapshots,
    )
