#!/usr/bin/python
# -*- coding: utf-8 -*-


class ShiftLabError(Exception): pass


class NonUnitInputError(ShiftLabError): pass


class DimensionMismatchError(ShiftLabError): pass


class BudgetExceededError(ShiftLabError): pass


class SamplerExhaustedError(ShiftLabError): pass


class DegenerateQueryError(ShiftLabError): pass


class AllRunsRejectedError(ShiftLabError): pass


class ConfigInvalidError(ShiftLabError): pass


class UnknownScenarioError(ShiftLabError): pass


class RegistrationError(ShiftLabError): pass


class WallTimeExceededError(ShiftLabError): pass


class SerializationError(ShiftLabError): pass
