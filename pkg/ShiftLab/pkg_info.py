#!/usr/bin/python
# -*- coding: utf-8 -*-
__version__ = '0.3.1'
__status__ = 'Work in Progress'
__license__ = 'MIT'

__module_name__ = 'ShiftLab'
