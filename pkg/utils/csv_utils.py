import csv
import io
import pathlib
from typing import Iterable, List, Union


def format_number(value) -> str:
    if isinstance(value, float):
        return repr(round(value, 12))
    return str(value)


def rows_to_csv(fieldnames: List[str], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fieldnames, extrasaction='ignore', lineterminator='\n')
    w.writeheader()
    for row in rows:
        w.writerow({k: format_number(v) for k, v in row.items()})
    return buf.getvalue()


def write_csv(path: Union[str, pathlib.Path], fieldnames: List[str], rows: Iterable[dict]) -> str:
    """
    Write rows with a fixed column order and '\\n' line endings; returns the text written.
    """
    text = rows_to_csv(fieldnames, rows)
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf8', newline='') as f:
        f.write(text)
    return text


def read_csv(path: Union[str, pathlib.Path]) -> List[dict]:
    with open(path, encoding='utf8', newline='') as f:
        return list(csv.DictReader(f))
