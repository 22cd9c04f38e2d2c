"""Report files: one flat record per row as comma separated values, the full structure as json"""
import csv
import json
import os
from typing import Any, Iterable, Mapping

from . import logger


def write_records_csv(path: str, records: Iterable[Mapping[str, Any]]) -> str:
    """Writes flat records; the columns are the keys of the first record in their order"""
    records = list(records)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as file:
        if records:
            writer = csv.DictWriter(file, fieldnames=list(records[0]))
            writer.writeheader()
            writer.writerows(records)
    logger.info(f'{len(records)} report rows were written to {path}')
    return path


def write_json(path: str, document: Any) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, 'w', encoding='utf-8') as file:
        json.dump(document, file, indent=2, sort_keys=True)
        file.write('\n')
    logger.info(f'Report was written to {path}')
    return path
