"""
Tests de codificación: ventanas → imágenes GAF, rasters e ingesta de CSV.

Los chequeos de propiedades (simetría, diagonal, identidad trigonométrica)
usan hypothesis sobre series aleatorias.
"""

import os
import sys
import tempfile

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

# Agregar directorio raíz al path
TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.dirname(TESTS_DIR))
sys.path.insert(0, TESTS_DIR)

from encoding.gaf import (
    GafImage,
    SensorWindow,
    encode_window,
    gasf_matrix,
    min_max_normalize,
    paa_downsample,
    polar_encode,
)
from encoding.ingest import load_windows, read_sensor_csv, segment_windows, window_label, windows_to_frame
from encoding.raster import dequantize_image, load_png, load_raw_image, quantize_image, save_png, save_raw
from errors import InvalidInputError
from helpers import run_test_functions, write_text

unit_series = arrays(
    np.float64,
    st.integers(min_value=1, max_value=40),
    elements=st.floats(min_value=-1.0, max_value=1.0, allow_nan=False),
)


def product_oracle(x_hat: np.ndarray) -> np.ndarray:
    """cos(θi + θj) = x̂i·x̂j − √(1−x̂i²)·√(1−x̂j²), sin pasar por arccos."""
    root = np.sqrt(np.clip(1.0 - x_hat**2, 0.0, None))
    return np.outer(x_hat, x_hat) - np.outer(root, root)


def window_from(x, y=None, z=None, label: int = 0) -> SensorWindow:
    x = np.asarray(x, dtype=np.float64)
    return SensorWindow(
        samples_x=x,
        samples_y=x if y is None else y,
        samples_z=x if z is None else z,
        timestamps=np.arange(x.size, dtype=np.float64),
        label=label,
    )


# === NORMALIZACIÓN Y POLARES ===


def test_min_max_normalize_examples():
    print("\n=== TEST 1: min_max_normalize ===")

    assert np.array_equal(min_max_normalize([2, 4, 6]), [-1.0, 0.0, 1.0])
    assert np.array_equal(min_max_normalize([5, 5, 5]), [0.0, 0.0, 0.0])
    assert np.array_equal(min_max_normalize([-1, 1]), [-1.0, 1.0])
    try:
        min_max_normalize([])
        assert False, "Serie vacía debería fallar"
    except InvalidInputError:
        pass
    print("✅ [2,4,6] → [-1,0,1], constante → ceros, vacía → error")


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 50), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_min_max_normalize_range(series):
    out = min_max_normalize(series)
    assert out.min() >= -1.0 and out.max() <= 1.0
    if series.max() > series.min():
        assert out[np.argmin(series)] == -1.0
        assert out[np.argmax(series)] == 1.0


def test_polar_encode_examples():
    print("\n=== TEST 2: polar_encode ===")

    assert polar_encode([1.0], [0.0]).theta[0] == 0.0
    assert np.isclose(polar_encode([0.0], [0.0]).theta[0], np.pi / 2, atol=1e-15)
    assert np.isclose(polar_encode([0.5], [0.0]).theta[0], np.pi / 3, atol=1e-15)

    polar = polar_encode([0.0, 1.0], [0.5, 1.5])
    assert np.array_equal(polar.radius, [0.5, 1.5])

    # Dentro de la tolerancia se recorta, fuera falla
    assert polar_encode([1.0 + 5e-13], [0.0]).theta[0] == 0.0
    try:
        polar_encode([1.1], [0.0])
        assert False, "Valor fuera de [-1, 1] debería fallar"
    except InvalidInputError as e:
        assert "1.1" in str(e)
    print("✅ arccos exacto en 1, 0 y 1/2; fuera de rango → error")


# === GASF ===


def test_gasf_examples():
    print("\n=== TEST 3: gasf_matrix ===")

    g = gasf_matrix([0.0, np.pi / 2])
    assert np.allclose(g, [[1.0, 0.0], [0.0, -1.0]], atol=1e-15)
    assert np.array_equal(gasf_matrix([0.0]), [[1.0]])
    print("✅ θ = [0, π/2] → [[1, 0], [0, −1]]")


@settings(max_examples=80, deadline=None)
@given(unit_series)
def test_gasf_properties(x_hat):
    g = gasf_matrix(np.arccos(x_hat))
    # Simetría exacta bit a bit
    assert np.array_equal(g, g.T)
    assert np.all(np.abs(g) <= 1.0)
    assert np.allclose(np.diag(g), 2.0 * x_hat**2 - 1.0, atol=1e-9)
    assert np.allclose(g, product_oracle(x_hat), atol=1e-9)


def test_gasf_oracle_length_32():
    print("\n=== TEST 4: Oráculo trigonométrico (n = 32) ===")

    x_hat = np.random.default_rng(7).uniform(-1.0, 1.0, size=32)
    error = np.max(np.abs(gasf_matrix(np.arccos(x_hat)) - product_oracle(x_hat)))
    assert error < 1e-9, error
    print(f"✅ error máximo {error:.2e}")


def test_gasf_thousand_seeded_series():
    """1000 series sembradas de largo 2–64: oráculo, simetría, diagonal y rango."""
    print("\n=== TEST 4b: 1000 series sembradas ===")

    rng = np.random.default_rng(1000)
    worst_oracle = worst_diagonal = 0.0
    for _ in range(1000):
        n = int(rng.integers(2, 65))
        x_hat = min_max_normalize(rng.normal(size=n) * rng.uniform(0.1, 10.0))
        g = gasf_matrix(polar_encode(x_hat, np.arange(n, dtype=np.float64)).theta)

        assert np.array_equal(g, g.T)
        assert np.all(np.abs(g) <= 1.0)
        worst_diagonal = max(worst_diagonal, float(np.max(np.abs(np.diag(g) - (2.0 * x_hat**2 - 1.0)))))
        worst_oracle = max(worst_oracle, float(np.max(np.abs(g - product_oracle(x_hat)))))

    assert worst_diagonal <= 1e-12, worst_diagonal
    assert worst_oracle < 1e-9, worst_oracle
    print(f"✅ diagonal {worst_diagonal:.1e}, oráculo {worst_oracle:.1e}")


# === PAA ===


def test_paa_examples():
    print("\n=== TEST 5: paa_downsample ===")

    assert np.array_equal(paa_downsample([1, 3, 5, 7], 2), [2.0, 6.0])
    assert np.array_equal(paa_downsample([1, 2, 3], 2), [1.5, 3.0])
    series = np.random.default_rng(0).normal(size=9)
    assert np.array_equal(paa_downsample(series, 9), series)
    for target in (0, 10):
        try:
            paa_downsample(series, target)
            assert False, f"target={target} debería fallar"
        except InvalidInputError:
            pass
    print("✅ medias por frame, identidad con target = n, rangos inválidos → error")


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.data())
def test_paa_monotone_series(n, data):
    target = data.draw(st.integers(1, n))
    series = np.arange(n, dtype=np.float64)
    out = paa_downsample(series, target)
    assert out.shape == (target,)
    # Serie creciente → medias crecientes
    assert np.all(np.diff(out) > 0)


def test_paa_keeps_mean_with_equal_frames():
    rng = np.random.default_rng(3)
    for target in (1, 2, 4, 8):
        for frame in (1, 3, 5):
            series = rng.normal(size=target * frame)
            assert abs(paa_downsample(series, target).mean() - series.mean()) < 1e-12


# === VENTANA COMPLETA ===


def test_constant_window_all_minus_one():
    print("\n=== TEST 6: Ventana constante ===")

    for side in (2, 3, 5):
        image = encode_window(window_from(np.full(8, 2.5)), side)
        assert image.channels.shape == (3, side, side)
        assert np.array_equal(image.channels, -np.ones((3, side, side)))
    print("✅ Canales todo −1 para cualquier lado")


def test_axis_x_composition():
    print("\n=== TEST 7: Composición en el eje x ===")

    rng = np.random.default_rng(1)
    window = window_from([2.0, 4.0, 6.0], y=rng.normal(size=3), z=rng.normal(size=3), label=4)
    image = encode_window(window, 3)
    assert np.array_equal(image.channels[0], gasf_matrix(np.arccos([-1.0, 0.0, 1.0])))
    assert image.label == 4
    print("✅ canal x == gasf_matrix(arccos([-1, 0, 1]))")


def test_end_to_end_oracle_side_16():
    """Pipeline vs oráculo paso a paso (PAA por reshape + identidad del producto)."""
    print("\n=== TEST 8: Oráculo end-to-end (lado 16) ===")

    rng = np.random.default_rng(2024)
    axes = rng.normal(size=(3, 64))
    window = window_from(axes[0], y=axes[1], z=axes[2])
    image = encode_window(window, 16)

    for channel, series in enumerate(axes):
        reduced = series.reshape(16, 4).mean(axis=1)
        x_hat = 2.0 * (reduced - reduced.min()) / (reduced.max() - reduced.min()) - 1.0
        assert np.allclose(image.channels[channel], product_oracle(x_hat), atol=1e-9), channel
    print("✅ Los tres canales coinciden con el oráculo")


def test_encode_window_deterministic():
    rng = np.random.default_rng(9)
    axes = rng.normal(size=(3, 40))
    window = window_from(axes[0], y=axes[1], z=axes[2], label=2)
    twin = window_from(axes[0].copy(), y=axes[1].copy(), z=axes[2].copy(), label=2)

    first = encode_window(window, 10)
    assert np.array_equal(first.channels, encode_window(window, 10).channels)
    assert np.array_equal(first.channels, encode_window(twin, 10).channels)
    assert first.flatten().tobytes() == encode_window(twin, 10).flatten().tobytes()


def test_encode_window_side_errors():
    print("\n=== TEST 9: Lados inválidos ===")

    window = window_from(np.arange(4.0))
    for side in (1, 5):
        try:
            encode_window(window, side)
            assert False, f"side={side} debería fallar"
        except InvalidInputError:
            pass
    print("✅ side < 2 o side > n → error")


def test_sensor_window_validation():
    print("\n=== TEST 10: SensorWindow ===")

    bad_cases = {
        "longitudes": dict(samples_x=[1, 2, 3], samples_y=[1, 2], samples_z=[1, 2, 3], timestamps=[0, 1, 2]),
        "timestamps": dict(samples_x=[1, 2], samples_y=[1, 2], samples_z=[1, 2], timestamps=[1, 1]),
        "n < 2": dict(samples_x=[1], samples_y=[1], samples_z=[1], timestamps=[0]),
    }
    for name, fields in bad_cases.items():
        try:
            SensorWindow(label=0, **fields)
            assert False, f"{name} debería fallar"
        except InvalidInputError:
            print(f"   ✅ {name}")


# === RASTERS ===


def test_quantize_endpoints():
    print("\n=== TEST 11: Cuantización ===")

    channels = np.stack([np.full((2, 2), -1.0), np.zeros((2, 2)), np.ones((2, 2))])

    raster = quantize_image(GafImage(channels=channels, label=0))
    assert raster.dtype == np.uint8 and raster.shape == (2, 2, 3)
    assert np.all(raster[..., 0] == 0)
    assert np.all(raster[..., 1] == 128)
    assert np.all(raster[..., 2] == 255)
    print("✅ −1 → 0, 0 → 128, 1 → 255; x→R, y→G, z→B")


def test_png_round_trip():
    print("\n=== TEST 12: PNG ida y vuelta ===")

    rng = np.random.default_rng(3)
    image = encode_window(window_from(rng.normal(size=32), y=rng.normal(size=32), z=rng.normal(size=32)), 8)
    assert np.max(np.abs(dequantize_image(quantize_image(image)).channels - image.channels)) <= 1 / 255 + 1e-12

    with tempfile.TemporaryDirectory() as tmp:
        path = save_png(image, os.path.join(tmp, "window.png"))
        loaded = load_png(path)
    error = np.max(np.abs(loaded.channels - image.channels))
    assert error <= 1 / 255 + 1e-12, error
    print(f"✅ error máximo {error:.4f} ≤ 1/255")


def test_csv_to_raw_bit_exact():
    """CSV → ventanas → GAF → raw → recarga: idéntico bit a bit."""
    print("\n=== TEST 13: CSV → raw ===")

    rng = np.random.default_rng(4)
    windows = [
        SensorWindow(
            samples_x=rng.normal(size=16),
            samples_y=rng.normal(size=16),
            samples_z=rng.normal(size=16),
            timestamps=np.arange(16) / 50.0 + 16 * i / 50.0,
            label=i,
        )
        for i in range(2)
    ]
    with tempfile.TemporaryDirectory() as tmp:
        csv_path = os.path.join(tmp, "sensor.csv")
        windows_to_frame(windows).to_csv(csv_path, index=False, float_format="%.17g")
        reloaded = load_windows(csv_path, 16)
        for original, window in zip(windows, reloaded):
            assert np.array_equal(original.samples_x, window.samples_x)
            image = encode_window(window, 8)
            raw_path = save_raw(image, os.path.join(tmp, "window.raw"))
            assert np.array_equal(load_raw_image(raw_path, image.label).channels, image.channels)
    print("✅ Ida y vuelta exacta")


# === INGESTA ===

HEADER = "timestamp,ax,ay,az,label\n"


def test_malformed_row_reports_line():
    print("\n=== TEST 14: Fila mal formada ===")

    with tempfile.TemporaryDirectory() as tmp:
        path = write_text(tmp, "bad.csv", HEADER + "0,1,2,3,0\n1,1,abc,3,0\n")
        try:
            read_sensor_csv(path)
            assert False, "Debería lanzar InvalidInputError"
        except InvalidInputError as e:
            assert "línea 3" in str(e), str(e)
            print(f"✅ {e}")


def test_header_and_empty_errors():
    print("\n=== TEST 15: Encabezado y archivo vacío ===")

    with tempfile.TemporaryDirectory() as tmp:
        cases = {
            "vacío": write_text(tmp, "empty.csv", ""),
            "solo encabezado": write_text(tmp, "header.csv", HEADER),
            "encabezado": write_text(tmp, "cols.csv", "t,x,y,z,label\n0,1,2,3,0\n"),
            "label negativo": write_text(tmp, "neg.csv", HEADER + "0,1,2,3,-1\n"),
        }
        for name, path in cases.items():
            try:
                read_sensor_csv(path)
                assert False, f"{name} debería fallar"
            except InvalidInputError:
                print(f"   ✅ {name}")


def test_invalid_utf8_rejected():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "binario.csv")
        with open(path, "wb") as f:
            f.write(HEADER.encode("utf-8") + b"0,1,2,3,0\n0.1,\xff\xfe,2,3,0\n")
        try:
            read_sensor_csv(path)
            assert False, "Bytes no UTF-8 deberían fallar"
        except InvalidInputError as e:
            assert "UTF-8" in str(e), str(e)

        try:
            read_sensor_csv(tmp)
            assert False, "Un directorio no es un CSV"
        except InvalidInputError:
            pass


def test_segmentation():
    print("\n=== TEST 16: Segmentación ===")

    rows = "".join(f"{i * 0.02},{i},{-i},{i % 3},{1 if i < 4 else 2}\n" for i in range(11))
    with tempfile.TemporaryDirectory() as tmp:
        path = write_text(tmp, "ok.csv", HEADER + rows)
        windows = segment_windows(read_sensor_csv(path), 5)

        # 11 filas, ventanas de 5: la parcial final se descarta
        assert len(windows) == 2
        assert windows[0].label == 1 and windows[1].label == 2
        assert np.array_equal(windows[1].samples_x, [5, 6, 7, 8, 9])

        try:
            load_windows(path, 12)
            assert False, "Sin ventanas completas debería fallar"
        except InvalidInputError:
            pass

        rows = "0,1,1,1,0\n1,1,1,1,0\n2,1,1,1,0\n3,1,1,1,0\n2.5,1,1,1,0\n5,1,1,1,0\n"
        path = write_text(tmp, "non_monotonic.csv", HEADER + rows)
        try:
            load_windows(path, 3)
            assert False, "Timestamps no monótonos deberían fallar"
        except InvalidInputError as e:
            assert "Ventana 1" in str(e)
    print("✅ Ventanas consecutivas, parcial descartada, error nombra la ventana")


def test_window_label_majority():
    assert window_label(np.array([2, 1, 2, 1])) == 1
    assert window_label(np.array([3, 3, 0])) == 3


def run_all_tests():
    return run_test_functions(
        "TESTS DE CODIFICACIÓN GAF",
        [
            test_min_max_normalize_examples,
            test_min_max_normalize_range,
            test_polar_encode_examples,
            test_gasf_examples,
            test_gasf_properties,
            test_gasf_oracle_length_32,
            test_gasf_thousand_seeded_series,
            test_paa_examples,
            test_paa_monotone_series,
            test_paa_keeps_mean_with_equal_frames,
            test_constant_window_all_minus_one,
            test_axis_x_composition,
            test_end_to_end_oracle_side_16,
            test_encode_window_deterministic,
            test_encode_window_side_errors,
            test_sensor_window_validation,
            test_quantize_endpoints,
            test_png_round_trip,
            test_csv_to_raw_bit_exact,
            test_malformed_row_reports_line,
            test_header_and_empty_errors,
            test_invalid_utf8_rejected,
            test_segmentation,
            test_window_label_majority,
        ],
    )


if __name__ == "__main__":
    sys.exit(0 if run_all_tests() else 1)
