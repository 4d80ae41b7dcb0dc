"""
Carga de Paneles de Rentabilidades
CSV genéricos de rentabilidades o precios, formato de 10 industrias de Ken French y partición de períodos
"""

import csv
import logging
import os
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from ..analysis.market_model import ReturnMatrix
from ..utils.errors import (
    DuplicateDate, EmptySide, MissingData, NonPositivePrice, ParseError, RaggedRow,
)

logger = logging.getLogger(__name__)

ISO_LABEL = re.compile(r'^\d{4}-\d{2}-\d{2}$')
MONTH_LABEL = re.compile(r'^\d{4}(0[1-9]|1[0-2])$')
FRENCH_ROW = re.compile(r'^\s*(\d{6})[,\s]')
FRENCH_SEPARATOR = re.compile(r'[,\s]+')
FRENCH_NAME = re.compile(r'^[A-Za-z][A-Za-z0-9_&]*$')
MISSING_SENTINELS = (-99.99, -999.0)


@dataclass(frozen=True)
class PeriodSplit:
    """Partición en muestra de estimación y muestra de prueba"""
    in_sample: ReturnMatrix
    out_sample: ReturnMatrix
    split_label: str


# === ETIQUETAS DE PERÍODO ===

def label_key(label: str) -> str:
    """Clave ordenable: YYYYMM se compara como el primer día del mes"""
    if ISO_LABEL.match(label):
        return label
    if MONTH_LABEL.match(label):
        return f"{label[:4]}-{label[4:]}-01"
    raise ParseError(f"Etiqueta de período inválida: {label!r} (se espera YYYY-MM-DD o YYYYMM)")


def boundary_key(boundary: str) -> str:
    """Clave de frontera: un YYYYMM incluye todo el mes"""
    boundary = str(boundary).strip()
    if MONTH_LABEL.match(boundary):
        return f"{boundary[:4]}-{boundary[4:]}-31"
    return label_key(boundary)


def _sorted_panel(labels: List[str], values: np.ndarray, rows: List[int]) -> Tuple[List[str], np.ndarray]:
    """Validar duplicados y ordenar filas por etiqueta"""
    keys = [label_key(label) for label in labels]
    seen = {}
    for key, label, row in zip(keys, labels, rows):
        if key in seen:
            raise DuplicateDate(f"Período duplicado {label} (ya visto en la fila {seen[key]})",
                                row=row, column='date')
        seen[key] = row

    order = sorted(range(len(keys)), key=keys.__getitem__)
    if order != list(range(len(keys))):
        logger.warning("⚠️ Filas desordenadas en el archivo: se ordenan por fecha")
    return [labels[i] for i in order], values[order]


# === CSV GENÉRICO ===

def _check_field_counts(path: str):
    """Cada fila no vacía debe tener tantos campos como la cabecera"""
    with open(path, encoding='utf-8', newline='') as handle:
        lines = [line for line in handle if line.strip()]
    if not lines:
        return
    expected = None
    for row, fields in enumerate(csv.reader(lines), start=1):
        if expected is None:
            expected = len(fields)
        elif len(fields) != expected:
            raise RaggedRow(f"Se esperaban {expected} campos, la fila tiene {len(fields)}", row=row)


def _read_csv_panel(path: str) -> Tuple[List[str], List[str], np.ndarray]:
    """Leer 'date,NOMBRE1,...' y devolver (etiquetas, nombres, valores) ordenados"""
    if not os.path.isfile(path):
        raise ParseError(f"Archivo no encontrado: {path}")
    try:
        _check_field_counts(path)
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                          skip_blank_lines=True, encoding='utf-8')
    except pd.errors.EmptyDataError:
        raise ParseError(f"Archivo vacío: {path}")
    except pd.errors.ParserError as e:
        match = re.search(r'line (\d+)', str(e))
        raise RaggedRow("Fila con más campos que la cabecera",
                        row=int(match.group(1)) if match else None)
    except UnicodeDecodeError as e:
        raise ParseError(f"El archivo no es UTF-8 válido: {e}")

    header = [str(cell).strip() for cell in raw.iloc[0]]
    if header[0].lower() != 'date':
        raise ParseError("La primera columna debe llamarse 'date'", row=1, column=header[0])
    names = header[1:]
    if not names:
        raise ParseError("La cabecera no contiene activos", row=1)
    for name in names:
        if not name:
            raise ParseError("Nombre de activo vacío en la cabecera", row=1)
    duplicated = [name for name in names if names.count(name) > 1]
    if duplicated:
        raise ParseError("Nombre de activo duplicado", row=1, column=duplicated[0])

    body = raw.iloc[1:]
    if body.empty:
        raise ParseError(f"El archivo no tiene filas de datos: {path}")

    labels, rows = [], []
    values = np.empty((len(body), len(names)))
    for position, cells in enumerate(body.itertuples(index=False)):
        row = position + 2
        label = str(cells[0]).strip()
        if not (ISO_LABEL.match(label) or MONTH_LABEL.match(label)):
            raise ParseError(f"Etiqueta de período inválida: {label!r}", row=row, column='date')
        for column, (name, cell) in enumerate(zip(names, cells[1:])):
            text = str(cell).strip()
            if not text:
                raise ParseError("Celda vacía", row=row, column=name)
            try:
                value = float(text)
            except ValueError:
                raise ParseError(f"Valor no numérico {text!r}", row=row, column=name)
            if not np.isfinite(value):
                raise ParseError(f"Valor no finito {text!r}", row=row, column=name)
            values[position, column] = value
        labels.append(label)
        rows.append(row)

    labels, values = _sorted_panel(labels, values, rows)
    return labels, names, values


def load_returns_csv(path: str, percent: bool = False) -> ReturnMatrix:
    """Panel de rentabilidades simples; percent indica que los valores están en %"""
    labels, names, values = _read_csv_panel(path)
    logger.info(f"📊 Rentabilidades cargadas: {len(labels)} períodos × {len(names)} activos")
    return ReturnMatrix(values, tuple(names), tuple(labels), in_percent=percent)


def write_returns_csv(returns: ReturnMatrix, path: str):
    """Escritura simétrica a load_returns_csv (recarga exacta bit a bit)"""
    returns.to_frame().to_csv(path, float_format='%.17g', lineterminator='\n')


def load_prices_csv(path: str) -> ReturnMatrix:
    """Precios > 0 convertidos a rentabilidades simples p_t/p_{t−1} − 1"""
    labels, names, prices = _read_csv_panel(path)
    frame = pd.DataFrame(prices, columns=names, index=pd.Index(labels, name='date'))

    non_positive = np.argwhere(prices <= 0)
    if non_positive.size:
        i, j = non_positive[0]
        raise NonPositivePrice(f"Precio no positivo {prices[i, j]:g} en {labels[i]}", column=names[j])
    if len(labels) < 2:
        raise ParseError("Se necesitan al menos dos precios para calcular rentabilidades")

    returns = frame.pct_change(fill_method=None).iloc[1:]
    logger.info(f"📊 Precios convertidos: {len(returns)} rentabilidades × {len(names)} activos")
    return ReturnMatrix.from_frame(returns)


# === PARTICIÓN DE PERÍODOS ===

def split_periods(returns: ReturnMatrix, boundary: str) -> PeriodSplit:
    """Filas con etiqueta ≤ frontera a la muestra de estimación, el resto a la de prueba"""
    limit = boundary_key(boundary)
    keys = np.array([label_key(label) for label in returns.period_labels])
    inside = keys <= limit

    if not inside.any():
        raise EmptySide(f"La frontera {boundary} deja vacía la muestra de estimación")
    if inside.all():
        raise EmptySide(f"La frontera {boundary} deja vacía la muestra de prueba")

    split = PeriodSplit(in_sample=returns.select_rows(inside),
                        out_sample=returns.select_rows(~inside),
                        split_label=str(boundary))
    logger.info(f"📊 Partición en {boundary}: {split.in_sample.n_periods} + {split.out_sample.n_periods} períodos")
    return split


def select_period(returns: ReturnMatrix, start: Optional[str] = None,
                  end: Optional[str] = None) -> ReturnMatrix:
    """Recortar el panel a [start, end]; YYYYMM abarca el mes completo"""
    keys = np.array([label_key(label) for label in returns.period_labels])
    mask = np.ones(keys.size, dtype=bool)
    if start is not None:
        mask &= keys >= label_key(str(start).strip())
    if end is not None:
        mask &= keys <= boundary_key(end)
    if not mask.any():
        raise EmptySide(f"No hay períodos entre {start} y {end}")
    return returns.select_rows(mask)


# === FORMATO KEN FRENCH ===

def _french_header(lines: List[str]) -> Tuple[int, List[str]]:
    """Índice de la primera fila mensual y nombres de las industrias"""
    for index, line in enumerate(lines[:-1]):
        tokens = [token for token in FRENCH_SEPARATOR.split(line.strip()) if token]
        if len(tokens) >= 2 and all(FRENCH_NAME.match(token) for token in tokens):
            if FRENCH_ROW.match(lines[index + 1]):
                return index + 1, tokens
    raise ParseError("No se encontró el bloque mensual (cabecera de industrias seguida de filas YYYYMM)")


def load_french_10industry(path: str, keep_percent: bool = False) -> ReturnMatrix:
    """Bloque mensual del archivo de 10 industrias; acepta la variante separada por comas"""
    if not os.path.isfile(path):
        raise ParseError(f"Archivo no encontrado: {path}")
    with open(path, encoding='utf-8', errors='replace') as fh:
        lines = fh.read().splitlines()

    start, names = _french_header(lines)
    labels, rows, data = [], [], []
    for index in range(start, len(lines)):
        line = lines[index]
        # el bloque mensual termina en la primera línea en blanco (siguen tablas anuales)
        if not line.strip() or not FRENCH_ROW.match(line):
            break
        row = index + 1
        tokens = [token for token in FRENCH_SEPARATOR.split(line.strip()) if token]
        label, cells = tokens[0], tokens[1:]
        if len(cells) != len(names):
            raise RaggedRow(f"Se esperaban {len(names)} valores, hay {len(cells)}", row=row)

        parsed = []
        for name, cell in zip(names, cells):
            try:
                value = float(cell)
            except ValueError:
                raise ParseError(f"Valor no numérico {cell!r}", row=row, column=name)
            if any(abs(value - sentinel) < 1e-9 for sentinel in MISSING_SENTINELS):
                raise MissingData(f"Dato ausente ({cell}) en {label}", row=row, column=name)
            parsed.append(value)
        labels.append(label)
        rows.append(row)
        data.append(parsed)

    values = np.array(data, dtype=float)
    labels, values = _sorted_panel(labels, values, rows)
    if not keep_percent:
        values = values / 100.0

    logger.info(f"📊 Archivo de industrias: {len(labels)} meses × {len(names)} industrias")
    return ReturnMatrix(values, tuple(names), tuple(labels), in_percent=keep_percent)
