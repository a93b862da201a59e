import numpy as np
import pytest

from border_forge.gridmap import OccupancyGridMap


def free_map(width=40, height=40, resolution=1.0, origin=(0.0, 0.0, 0.0)):
    return OccupancyGridMap(
        resolution=resolution, origin=origin,
        cells=np.zeros((height, width), dtype=np.float64),
    )


@pytest.fixture
def small_map():
    return free_map(width=10, height=10, resolution=0.025)


@pytest.fixture
def lab_map():
    from border_forge import demo
    return demo.build_lab_map()
