#!/usr/bin/python
import sys

from ShiftLab.harness.cli import main

sys.exit(main())
