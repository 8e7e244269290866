#!/usr/bin/env python
import json
import logging
import os
import sys
from typing import Iterator

from ShiftLab.errors import ConfigInvalidError
from ShiftLab.harness.config import ExperimentConfig

logger = logging.getLogger(__name__)


def get_base_dir() -> str:
    cur_path = os.path.dirname(__file__)
    base_path = os.path.realpath(os.path.join(cur_path, ".."))
    return base_path


def get_config_files(root: str) -> Iterator[str]:
    for dname, dirs, files in os.walk(root):
        dirs[:] = [d for d in dirs if d != "data"]
        for fname in sorted(files):
            if fname.endswith(".json"):
                yield os.path.realpath(os.path.join(dname, fname))


def referenced_files(config: ExperimentConfig) -> Iterator[str]:
    if "file" in config.scenario:
        yield config.scenario["file"]
    if "points" in config.forster:
        yield config.forster["points"]


def check_config(fpath: str, base_dir: str) -> list:
    problems = []
    try:
        config = ExperimentConfig.load(fpath)
    except ConfigInvalidError as error:
        return [str(error)]
    for ref in referenced_files(config):
        if not os.path.isfile(os.path.join(base_dir, ref)):
            problems.append("missing referenced file {}".format(ref))
    return problems


if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    base_dir = get_base_dir()
    failures = {}
    for config_file in get_config_files(os.path.join(base_dir, "configs")):
        logger.debug("Checking %s", config_file)
        problems = check_config(config_file, base_dir)
        if problems:
            failures[os.path.relpath(config_file, base_dir)] = problems
    if failures:
        logger.error(json.dumps(failures, indent=2))
        sys.exit(1)
    logger.info("all configs valid")
