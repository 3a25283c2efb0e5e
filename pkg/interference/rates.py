"""Достижимые скорости: нижняя граница с усреднённой помехой и точная скорость с разделением времени."""
import numpy as np


def _capacity(snr):
    return np.log2(1.0 + snr)


def achievable_rate_bound(gain, interference, n1: int, power: float = 1.0):
    """
    R_a = (1/n1)·log2(1 + P·g / I) для усреднённой по времени помехи I.

    При I = 0 возвращается +inf: передача успешна при любой конечной скорости.
    """
    if n1 < 1:
        raise ValueError(f"Число слотов должно быть не меньше 1: {n1}")
    gain = np.asarray(gain, dtype=float)
    interference = np.asarray(interference, dtype=float)
    if np.any(gain <= 0):
        raise ValueError("Коэффициент усиления источника должен быть положительным")
    if np.any(interference < 0):
        raise ValueError("Помеха не может быть отрицательной")
    with np.errstate(divide='ignore'):
        snr = np.where(interference > 0, power * gain / np.where(interference > 0, interference, 1.0), np.inf)
    rate = _capacity(snr) / n1
    return float(rate) if rate.ndim == 0 else rate


def exact_slot_rate_oracle(gain: float, phases, n1: int, power: float = 1.0) -> float:
    """
    Точная скорость слота при разделении времени между Delta/n1 фазами помехи.

    R = (1/Delta)·Σ_i log2(1 + P·g / I_i), Delta = n1·(число фаз). Порядок фаз
    не важен, нулевая фаза даёт +inf.
    """
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size == 0:
        raise ValueError("Нужна хотя бы одна фаза помехи")
    if np.any(phases < 0):
        raise ValueError("Помеха не может быть отрицательной")
    if gain <= 0:
        raise ValueError("Коэффициент усиления источника должен быть положительным")
    if np.any(phases == 0):
        return float('inf')
    total_slots = n1 * phases.size
    return float(np.sum(_capacity(power * gain / phases)) / total_slots)
