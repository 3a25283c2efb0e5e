"""Валидаторы параметров эксперимента."""
import math
from typing import Any, Iterable, Tuple


class ConfigError(Exception):
    """Некорректная конфигурация эксперимента (все найденные ошибки сразу)."""

    def __init__(self, errors: str | list[str]):
        self.errors = [errors] if isinstance(errors, str) else list(errors)
        super().__init__("; ".join(self.errors))


def _as_float(value: Any) -> float | None:
    if isinstance(value, bool):
        return None
    try:
        number = float(value)
    except (TypeError, ValueError):
        return None
    return number if math.isfinite(number) else None


def validate_positive_float(value: Any, name: str) -> Tuple[bool, float | None, str]:
    """
    Валидация положительного числа.

    Returns:
        Tuple[bool, float | None, str]: (успех, число, сообщение об ошибке)
    """
    number = _as_float(value)
    if number is None:
        return False, None, f"{name}: ожидалось число, получено {value!r}"
    if number <= 0:
        return False, None, f"{name}: должно быть положительным, получено {number}"
    return True, number, ""


def validate_nonnegative_float(value: Any, name: str) -> Tuple[bool, float | None, str]:
    """Валидация неотрицательного числа."""
    number = _as_float(value)
    if number is None:
        return False, None, f"{name}: ожидалось число, получено {value!r}"
    if number < 0:
        return False, None, f"{name}: не может быть отрицательным, получено {number}"
    return True, number, ""


def validate_probability(value: Any, name: str) -> Tuple[bool, float | None, str]:
    """Валидация числа из [0, 1]."""
    number = _as_float(value)
    if number is None or not 0 <= number <= 1:
        return False, None, f"{name}: ожидалось число из [0, 1], получено {value!r}"
    return True, number, ""


def validate_positive_int(value: Any, name: str) -> Tuple[bool, int | None, str]:
    """
    Валидация положительного целого.

    Returns:
        Tuple[bool, int | None, str]: (успех, число, сообщение об ошибке)
    """
    if isinstance(value, bool):
        return False, None, f"{name}: ожидалось целое число, получено {value!r}"
    try:
        number = int(value)
    except (TypeError, ValueError):
        return False, None, f"{name}: ожидалось целое число, получено {value!r}"
    if number != value and not isinstance(value, str):
        return False, None, f"{name}: ожидалось целое число, получено {value!r}"
    if number < 1:
        return False, None, f"{name}: должно быть не меньше 1, получено {number}"
    return True, number, ""


def validate_power_of_two(value: Any, name: str) -> Tuple[bool, int | None, str]:
    """Валидация степени двойки (n_m_max, n1)."""
    ok, number, message = validate_positive_int(value, name)
    if not ok:
        return ok, number, message
    if number & (number - 1):
        return False, None, f"{name}: должно быть степенью двойки, получено {number}"
    return True, number, ""


def validate_choice(value: Any, choices: Iterable[str], name: str) -> Tuple[bool, str | None, str]:
    """Валидация значения из фиксированного набора."""
    choices = list(choices)
    if value not in choices:
        return False, None, f"{name}: допустимые значения {', '.join(choices)}, получено {value!r}"
    return True, value, ""


def validate_grid(values: Any, name: str) -> Tuple[bool, list[float] | None, str]:
    """Валидация непустого списка неотрицательных чисел."""
    if not isinstance(values, (list, tuple)) or not values:
        return False, None, f"{name}: ожидался непустой список чисел"
    numbers = [_as_float(v) for v in values]
    if any(n is None or n < 0 for n in numbers):
        return False, None, f"{name}: все значения должны быть неотрицательными числами"
    return True, numbers, ""


def validate_range(values: Any, name: str) -> Tuple[bool, tuple[float, float] | None, str]:
    """Валидация диапазона [нижняя, верхняя] из положительных чисел."""
    ok, numbers, message = validate_grid(values, name)
    if not ok:
        return ok, None, message
    if len(numbers) != 2 or numbers[0] <= 0 or numbers[0] > numbers[1]:
        return False, None, f"{name}: ожидался диапазон [нижняя, верхняя] из положительных чисел"
    return True, (numbers[0], numbers[1]), ""


def validate_cache_distribution(value: Any, name: str) -> Tuple[bool, str | float | list[float] | None, str]:
    """
    Валидация распределения кэширования p_A.

    Допустимы 'p_v' (как запросы), 'uniform', показатель Ципфа из (0, 1) или
    явный список вероятностей; длина и сумма списка проверяются при сборке
    ContentConfig.
    """
    if value in ('p_v', 'uniform'):
        return True, value, ""
    if isinstance(value, (list, tuple)):
        return validate_grid(value, name)
    number = _as_float(value)
    if number is None or not 0 < number < 1:
        return False, None, f"{name}: ожидалось 'p_v', 'uniform', показатель из (0, 1) или список, получено {value!r}"
    return True, number, ""
