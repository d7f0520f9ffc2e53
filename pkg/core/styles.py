"""
Centralized styling system for HyperBit CLI.
Provides consistent color schemes and formatting across all commands.
"""

from typing import Any, Optional


class Colors:
    """Centralized color definitions for consistent styling"""

    BRAND = "blue"  # Panel borders, section headers
    INTERACTIVE = "cyan"  # Commands, parameters
    ERROR = "red"  # Errors, failed tests, unstable equilibria
    SUCCESS = "green"  # Passed tests, stable equilibria
    WARNING = "yellow"  # Marginal results, diverged rows
    IDENTIFIER = "magenta"  # Stream labels, hex words
    PRIMARY = "white"  # Values
    SECONDARY = "dim"  # Labels, notes


class Styles:
    """Semantic styling functions for consistent formatting"""

    @staticmethod
    def stream(value: Any) -> str:
        return f"[{Colors.IDENTIFIER}]{value}[/{Colors.IDENTIFIER}]"

    @staticmethod
    def number(value: float, digits: int = 6) -> str:
        return f"[{Colors.PRIMARY}]{value:.{digits}f}[/{Colors.PRIMARY}]"

    @staticmethod
    def p_value(value: float, alpha: float = 0.01) -> str:
        """p-value colored by pass (>= alpha) or fail"""
        color = Colors.SUCCESS if value >= alpha else Colors.ERROR
        return f"[{color}]{value:.6f}[/{color}]"

    @staticmethod
    def proportion(n_pass: int, n_total: int, floor: Optional[float] = None) -> str:
        if floor is None or n_total == 0:
            color = Colors.PRIMARY
        else:
            color = Colors.SUCCESS if n_pass / n_total >= floor else Colors.ERROR
        return f"[{color}]{n_pass}/{n_total}[/{color}]"

    @staticmethod
    def classification(value: Any) -> str:
        """Equilibrium classification with its color"""
        color = Styles.get_classification_color(value)
        return f"[{color}]{value}[/{color}]"

    @staticmethod
    def get_classification_color(value: Any) -> str:
        """Get just the color name for a classification (without Rich markup)"""
        value_lower = str(getattr(value, "value", value)).lower()
        if value_lower == "stable":
            return Colors.SUCCESS
        elif value_lower == "unstable":
            return Colors.ERROR
        elif value_lower == "marginal_zero":
            return Colors.WARNING
        return Colors.SECONDARY

    @staticmethod
    def brand(value: Any) -> str:
        return f"[{Colors.BRAND}]{value}[/{Colors.BRAND}]"

    @staticmethod
    def success(value: Any) -> str:
        return f"[{Colors.SUCCESS}]{value}[/{Colors.SUCCESS}]"

    @staticmethod
    def error(value: Any) -> str:
        return f"[{Colors.ERROR}]{value}[/{Colors.ERROR}]"

    @staticmethod
    def warning(value: Any) -> str:
        return f"[{Colors.WARNING}]{value}[/{Colors.WARNING}]"


class TableStyles:
    """Predefined table column styles"""

    @staticmethod
    def suite_report():
        return {
            "Stream": None,  # Styles.stream()
            "Test": Colors.PRIMARY,
            "Mean p": None,  # Styles.p_value()
            "Proportion": None,  # Styles.proportion()
            "Uniformity p": None,  # Styles.number()
            "KS p": None,  # Styles.number()
        }

    @staticmethod
    def entropy_table():
        return {"N_b": Colors.INTERACTIVE, "Entropy/bit": Colors.PRIMARY}

    @staticmethod
    def spectrum_table():
        return {
            "c": Colors.INTERACTIVE,
            "L1": Colors.PRIMARY,
            "L2": Colors.PRIMARY,
            "L3": Colors.PRIMARY,
            "L4": Colors.PRIMARY,
            "L5": Colors.PRIMARY,
            "D_L": Colors.SUCCESS,
        }


class PanelStyles:
    """Centralized panel styling configurations"""

    @staticmethod
    def standard():
        return {"title_align": "left", "border_style": Colors.BRAND, "padding": (1, 2)}
