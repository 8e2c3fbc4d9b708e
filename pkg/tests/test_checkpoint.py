import numpy as np
import pytest

from gpfr.errors import MalformedHeaderError, TruncatedFileError
from gpfr.nn import Dense, LayerStack, Softmax, Tanh, load_stack, read_container, save_stack, write_container


@pytest.fixture
def stack():
    rng = np.random.default_rng(11)
    return LayerStack([Dense(5, 8, rng), Tanh(), Dense(8, 3, rng), Softmax()])


def test_stack_roundtrip_preserves_outputs(tmp_path, stack):
    path = tmp_path / "model.gpfr"
    save_stack(path, stack, meta={"config_hash": "abc"})
    loaded, meta = load_stack(path)
    assert meta["config_hash"] == "abc"
    x = np.random.default_rng(0).standard_normal((4, 5)).astype(np.float32)
    y0, _ = stack.forward(x)
    y1, _ = loaded.forward(x)
    np.testing.assert_array_equal(y0, y1)


def test_magic_and_version(tmp_path, stack):
    path = tmp_path / "model.gpfr"
    save_stack(path, stack)
    raw = path.read_bytes()
    assert raw[:4] == b"GPFR"
    assert int.from_bytes(raw[4:6], "little") == 1
    path.write_bytes(b"NOPE" + raw[4:])
    with pytest.raises(MalformedHeaderError):
        read_container(path)
    path.write_bytes(raw[:4] + (99).to_bytes(2, "little") + raw[6:])
    with pytest.raises(MalformedHeaderError):
        read_container(path)


def test_truncation_detected(tmp_path, stack):
    path = tmp_path / "model.gpfr"
    save_stack(path, stack)
    raw = path.read_bytes()
    path.write_bytes(raw[:-5])
    with pytest.raises(TruncatedFileError):
        read_container(path)


def test_trailing_bytes_detected(tmp_path, stack):
    path = tmp_path / "model.gpfr"
    save_stack(path, stack)
    path.write_bytes(path.read_bytes() + b"xx")
    with pytest.raises(MalformedHeaderError, match="trailing"):
        read_container(path)


def test_kind_mismatch(tmp_path):
    path = tmp_path / "art.gpfr"
    write_container(path, {"kind": "repository"}, [])
    with pytest.raises(MalformedHeaderError, match="kind"):
        load_stack(path, expect_kind="model")


def test_parameters_stored_as_exact_f32(tmp_path, stack):
    path = tmp_path / "model.gpfr"
    save_stack(path, stack)
    _, tensors = read_container(path)
    # fixed order: layer order, name-sorted within (bias before weight)
    np.testing.assert_array_equal(tensors[0], stack.layers[0].bias)
    np.testing.assert_array_equal(tensors[1], stack.layers[0].weight)
    assert tensors[1].dtype == np.float32


def test_rerun_write_is_byte_identical(tmp_path, stack):
    a, b = tmp_path / "a.gpfr", tmp_path / "b.gpfr"
    save_stack(a, stack, meta={"config_hash": "h"})
    save_stack(b, stack, meta={"config_hash": "h"})
    assert a.read_bytes() == b.read_bytes()
