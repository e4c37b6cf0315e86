# -*- coding: utf-8 -*-
"""
****************************************************
*                     Utility                      *
*            (c) 2020-2023 Alexander Hering        *
****************************************************
"""
import json
import os
from typing import Any


def dumps(data: Any) -> str:
    """
    Function for encoding data as canonical JSON: sorted keys, fixed indentation.
    :param data: JSON-compatible data.
    :return: JSON string.
    """
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)


def save(data: Any, path: str) -> str:
    """
    Function for saving data as canonical JSON, creating missing parent folders.
    :param data: JSON-compatible data.
    :param path: Save path.
    :return: Save path.
    """
    folder = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(folder):
        os.makedirs(folder)
    with open(path, "w", encoding="utf-8") as out_file:
        out_file.write(dumps(data))
    return path


def load(path: str) -> Any:
    """
    Function for loading json data from path.
    :param path: Load path.
    :return: Loaded data.
    """
    with open(path, "r", encoding="utf-8") as in_file:
        return json.load(in_file)


def is_json(path: str) -> bool:
    """
    Function for checking whether path is json file.
    :param path: Path to file.
    :return: True if path leads to json file, else False.
    """
    return os.path.isfile(path) and os.path.splitext(path)[1] == ".json"
