import math

import numpy as np
import pytest

from border_forge.errors import MapFormatError, OutOfBoundsError
from border_forge.gridmap import (
    OccupancyGridMap,
    UNKNOWN_PIXEL,
    load_map,
    maps_equal,
    save_map,
)

from .conftest import free_map


def write_test_map(tmp_path, pixels, name="m", resolution=0.05, origin=(0.0, 0.0, 0.0),
                   negate=0, mode=None, free_thresh=0.196, occupied_thresh=0.65):
    height, width = pixels.shape
    pgm = tmp_path / f"{name}.pgm"
    with open(pgm, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode())
        f.write(pixels.astype(np.uint8).tobytes())
    yaml_path = tmp_path / f"{name}.yaml"
    lines = [
        f"image: {name}.pgm",
        f"resolution: {resolution}",
        f"origin: [{origin[0]}, {origin[1]}, {origin[2]}]",
        f"negate: {negate}",
        f"occupied_thresh: {occupied_thresh}",
        f"free_thresh: {free_thresh}",
    ]
    if mode:
        lines.append(f"mode: {mode}")
    yaml_path.write_text("\n".join(lines) + "\n")
    return yaml_path


class TestLoad:
    def test_pixel_254_is_free(self, tmp_path):
        grid = load_map(write_test_map(tmp_path, np.full((2, 2), 254)))
        assert grid.cells[0, 0] == pytest.approx(1 / 255)
        assert grid.cells[0, 0] < grid.free_thresh

    def test_pixel_0_is_occupied(self, tmp_path):
        grid = load_map(write_test_map(tmp_path, np.zeros((2, 2))))
        assert np.all(grid.cells == 1.0)

    def test_lab_scale(self, tmp_path):
        # 244x140 cells at 2.5 cm covers a 6.1 m x 3.5 m room
        grid = load_map(write_test_map(tmp_path, np.full((140, 244), 254), resolution=0.025))
        assert grid.width * grid.resolution == pytest.approx(6.1)
        assert grid.height * grid.resolution == pytest.approx(3.5)

    def test_trinary_band_loads_unknown(self, tmp_path):
        grid = load_map(write_test_map(tmp_path, np.full((2, 2), UNKNOWN_PIXEL)))
        assert np.all(np.isnan(grid.cells))

    def test_raw_mode_keeps_band_values(self, tmp_path):
        grid = load_map(write_test_map(tmp_path, np.full((2, 2), UNKNOWN_PIXEL), mode="raw"))
        assert np.all(grid.cells == (255 - UNKNOWN_PIXEL) / 255)

    def test_negate_inverts(self, tmp_path):
        grid = load_map(write_test_map(tmp_path, np.full((2, 2), 254), negate=1))
        assert np.all(grid.cells == 254 / 255)

    def test_row_zero_is_bottom(self, tmp_path):
        pixels = np.full((3, 2), 254)
        pixels[0, :] = 0  # top image row occupied
        grid = load_map(write_test_map(tmp_path, pixels))
        assert np.all(grid.cells[2, :] == 1.0)
        assert np.all(grid.cells[0, :] < 0.1)

    def test_monotone_in_darkness(self, tmp_path):
        pixels = np.arange(256, dtype=np.uint8).reshape(16, 16)
        grid = load_map(write_test_map(tmp_path, pixels, mode="raw"))
        flat = np.flipud(grid.cells).ravel()  # back to image order
        assert np.all(np.diff(flat) < 0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(MapFormatError):
            load_map(str(tmp_path / "nope.yaml"))

    def test_missing_image(self, tmp_path):
        path = write_test_map(tmp_path, np.zeros((2, 2)))
        (tmp_path / "m.pgm").unlink()
        with pytest.raises(MapFormatError):
            load_map(path)

    def test_malformed_header(self, tmp_path):
        path = write_test_map(tmp_path, np.zeros((2, 2)))
        (tmp_path / "m.pgm").write_bytes(b"P2\n2 2\n255\n")
        with pytest.raises(MapFormatError):
            load_map(path)

    def test_dimension_mismatch(self, tmp_path):
        path = write_test_map(tmp_path, np.zeros((2, 2)))
        (tmp_path / "m.pgm").write_bytes(b"P5\n4 4\n255\n" + b"\x00" * 7)
        with pytest.raises(MapFormatError):
            load_map(path)

    def test_missing_required_field(self, tmp_path):
        path = write_test_map(tmp_path, np.zeros((2, 2)))
        path.write_text("image: m.pgm\n")
        with pytest.raises(MapFormatError):
            load_map(path)

    def test_pgm_comment_headers(self, tmp_path):
        path = write_test_map(tmp_path, np.zeros((2, 2)))
        (tmp_path / "m.pgm").write_bytes(b"P5\n# made by a mapper\n2 2\n255\n" + b"\x00" * 4)
        grid = load_map(path)
        assert grid.width == 2 and grid.height == 2


class TestSaveRoundTrip:
    def test_loaded_map_saves_identical_bytes(self, tmp_path):
        pixels = np.array([[0, 254, 205], [100, 90, 206]], dtype=np.uint8)
        src = write_test_map(tmp_path, pixels, name="src", mode="raw")
        grid = load_map(src)
        out = tmp_path / "copy.yaml"
        save_map(grid, str(out))
        assert (tmp_path / "copy.pgm").read_bytes() == (tmp_path / "src.pgm").read_bytes()

    def test_unknown_saves_as_205(self, tmp_path):
        grid = free_map(width=2, height=1)
        grid.cells[0, 0] = np.nan
        save_map(grid, str(tmp_path / "u.yaml"))
        raster = (tmp_path / "u.pgm").read_bytes().split(b"255\n", 1)[1]
        assert raster[0] == UNKNOWN_PIXEL
        assert raster[1] == 255  # p=0 under negate=0

    def test_load_save_load_preserves_cells_and_metadata(self, tmp_path):
        rng = np.random.default_rng(7)
        # trinary-stable pixel classes: free, occupied, unknown sentinel
        choices = np.concatenate([np.arange(206, 256), np.arange(0, 90), [205]])
        pixels = rng.choice(choices, size=(13, 9)).astype(np.uint8)
        src = write_test_map(tmp_path, pixels, name="r", resolution=0.075,
                             origin=(1.5, -2.25, 0.4))
        m1 = load_map(src)
        save_map(m1, str(tmp_path / "r2.yaml"))
        m2 = load_map(str(tmp_path / "r2.yaml"))
        assert maps_equal(m1, m2)
        assert (tmp_path / "r2.pgm").read_bytes() == (tmp_path / "r.pgm").read_bytes()

    def test_posterior_map_is_loadable(self, tmp_path):
        from border_forge import demo, engine
        session = engine.apply_script(demo.build_lab_map(), demo.teaching_script())
        save_map(session.current, str(tmp_path / "post.yaml"))
        again = load_map(str(tmp_path / "post.yaml"))
        assert maps_equal(session.current, again)


class TestCoordinates:
    def test_simple_world_to_cell(self):
        grid = free_map(width=80, height=40, resolution=0.025)
        assert tuple(grid.world_to_cell((1.0, 0.5))) == (40, 20)

    def test_boundary_uses_floor(self):
        grid = free_map(width=80, height=40, resolution=0.025)
        # a point exactly on the edge between cells 39 and 40 floors to 40
        assert grid.world_to_cell((1.0, 0.9875)).col == 40

    def test_rotated_origin(self):
        grid = free_map(width=80, height=80, resolution=0.025,
                        origin=(1.0, 1.0, math.pi / 2))
        c = grid.world_to_cell((1.0, 2.0))
        assert tuple(c) == (40, 0)
        # independent check via explicit inverse rotation matrix
        yaw = math.pi / 2
        r_inv = np.array([[math.cos(yaw), math.sin(yaw)],
                          [-math.sin(yaw), math.cos(yaw)]])
        gx, gy = r_inv @ (np.array([1.0, 2.0]) - np.array([1.0, 1.0]))
        assert (math.floor(gx / 0.025), math.floor(gy / 0.025)) == tuple(c)

    def test_cell_center(self):
        grid = free_map(resolution=0.025)
        assert grid.cell_to_world((0, 0)) == pytest.approx((0.0125, 0.0125))

    def test_round_trip_all_cells(self):
        grid = free_map(width=10, height=10, resolution=0.3, origin=(2.0, -1.0, 0.7))
        for col in range(10):
            for row in range(10):
                assert tuple(grid.world_to_cell(grid.cell_to_world((col, row)))) == (col, row)

    def test_rotated_cell_to_world_inverts(self):
        grid = free_map(width=80, height=80, resolution=0.025,
                        origin=(1.0, 1.0, math.pi / 2))
        p = grid.cell_to_world((40, 0))
        assert tuple(grid.world_to_cell(p)) == (40, 0)

    def test_out_of_bounds_point(self):
        grid = free_map(width=10, height=10, resolution=1.0)
        with pytest.raises(OutOfBoundsError):
            grid.world_to_cell((11.0, 1.0))
        with pytest.raises(OutOfBoundsError):
            grid.world_to_cell((-0.5, 1.0))

    def test_out_of_bounds_cell(self):
        grid = free_map(width=10, height=10)
        with pytest.raises(OutOfBoundsError):
            grid.cell_to_world((10, 0))


class TestInvariants:
    def test_threshold_ordering_enforced(self):
        with pytest.raises(MapFormatError):
            OccupancyGridMap(resolution=1.0, origin=(0, 0, 0),
                             cells=np.zeros((2, 2)), free_thresh=0.7, occupied_thresh=0.6)

    def test_value_range_enforced(self):
        with pytest.raises(MapFormatError):
            OccupancyGridMap(resolution=1.0, origin=(0, 0, 0), cells=np.full((2, 2), 1.5))

    def test_all_256_pixel_values_quantize_round_trip(self, tmp_path):
        pixels = np.arange(256, dtype=np.uint8).reshape(16, 16)
        src = write_test_map(tmp_path, pixels, name="q", mode="raw")
        grid = load_map(src)
        save_map(grid, str(tmp_path / "q2.yaml"))
        assert (tmp_path / "q2.pgm").read_bytes() == (tmp_path / "q.pgm").read_bytes()
