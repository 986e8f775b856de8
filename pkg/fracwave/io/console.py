from typing import Iterable, Sequence, Tuple

from rich.console import Console
from rich.table import Table

console = Console()
error_console = Console(stderr=True)


def print_table(title: str, columns: Sequence[str], rows: Iterable[Sequence], **kwargs) -> None:
    table = Table(title=title, **kwargs)
    for name in columns:
        table.add_column(name, justify="right")
    for row in rows:
        table.add_row(*[_cell(v) for v in row])
    console.print(table)


def _cell(value) -> str:
    if isinstance(value, complex):
        return f"{value.real:.6g} {value.imag:+.6g}i"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def print_resonances(title: str, values: Iterable[complex], limit: int = 20) -> None:
    """Resonances ordered by distance to the real axis."""
    ordered = sorted(values, key=lambda v: (abs(v.imag), v.real))[:limit]
    print_table(title, ["#", "Re tau", "Im tau"], [(i + 1, v.real, v.imag) for i, v in enumerate(ordered)])


def print_summary(title: str, items: Iterable[Tuple[str, object]]) -> None:
    print_table(title, ["quantity", "value"], items, show_header=False)


def print_checks(results: Iterable[Tuple[str, bool, str]]) -> None:
    table = Table(title="fracwave selftest")
    table.add_column("check")
    table.add_column("result")
    table.add_column("detail")
    for name, passed, detail in results:
        table.add_row(name, "[bold green]pass[/bold green]" if passed else "[bold red]FAIL[/bold red]", detail)
    console.print(table)
