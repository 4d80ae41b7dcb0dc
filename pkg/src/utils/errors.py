"""
Jerarquía de errores del motor de carteras
Los errores de dominio terminan con código 1 y los de entrada con código 2
"""

from typing import Optional


class PortfolioError(ValueError):
    """Error base de la librería"""

    exit_code = 1


class DomainError(PortfolioError):
    """El mercado o la tasa no admiten la construcción pedida"""

    exit_code = 1


class InputError(PortfolioError):
    """Datos de entrada o parámetros inválidos"""

    exit_code = 2


# === Errores de dominio ===

class NotPositiveDefinite(DomainError):
    pass


class DegenerateMarket(DomainError):
    pass


class NonPositiveGmvReturn(DomainError):
    pass


class RateTooHigh(DomainError):
    pass


class ZeroRisk(DomainError):
    pass


class RatioTooSmall(DomainError):
    pass


class Infeasible(DomainError):
    pass


class MaxIterations(DomainError):
    pass


class InvalidPairing(DomainError):
    pass


# === Errores de entrada ===

class InvalidReturnMatrix(InputError):
    pass


class ParseError(InputError):
    """Error de lectura con ubicación opcional (fila/columna del archivo)"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        location = []
        if row is not None:
            location.append(f"fila {row}")
        if column is not None:
            location.append(f"columna '{column}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class DuplicateDate(ParseError):
    pass


class RaggedRow(ParseError):
    pass


class NonPositivePrice(ParseError):
    pass


class MissingData(ParseError):
    pass


class EmptySide(InputError):
    pass


class InvalidInterval(InputError):
    pass


class HorizonTooLong(InputError):
    pass


class ConfigError(InputError):
    pass


class InvalidWeights(InputError):
    pass
