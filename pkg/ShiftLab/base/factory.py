#!/usr/bin/python
from ShiftLab.errors import RegistrationError


class _ClassProperty(object):

    def __init__(self, f):
        self.f = f

    def __get__(self, instance, owner):
        return self.f(owner)


class Registrable(object):
    """
    Mixin giving a class the ``type_`` identifier used by
    :class:`ClassFactory` and by the serialized documents.
    """

    __identifier__ = 'ShiftLab'
    """
    Unique identifier domain. eg. ``"ShiftLab.nodes"``

    :meta hide-value:
    """

    NODE_NAME = None
    """
    Short human readable name.

    :meta hide-value:
    """

    @_ClassProperty
    def type_(cls):
        """
        Identifier followed by the class name.
        `eg.` ``"ShiftLab.nodes.InternalNode"``

        Returns:
            str: type (``__identifier__.__className__``)
        """
        return cls.__identifier__ + '.' + cls.__name__


class ClassFactory(object):
    """
    Factory that stores registered classes by their ``type_`` identifier
    so serialized documents can be rebuilt.
    """

    def __init__(self):
        self.__aliases = {}
        self.__names = {}
        self.__classes = {}

    @property
    def names(self):
        """
        Return all currently registered type identifiers.

        Returns:
            dict: key=<NODE_NAME>, value=list of types
        """
        return self.__names

    def resolve(self, type_):
        """
        Look up a registered class by type identifier or alias.

        Args:
            type_ (str): type identifier or alias name.

        Returns:
            type: registered class or None.
        """
        if type_ in self.__aliases:
            type_ = self.__aliases[type_]
        return self.__classes.get(type_)

    def create_instance(self, type_, *args, **kwargs):
        """
        Create an object by type identifier or alias.

        Args:
            type_ (str): type identifier or alias name.

        Returns:
            object: new instance.
        """
        _Class = self.resolve(type_)
        if _Class is None:
            raise RegistrationError('type "{}" is not registered'.format(type_))
        return _Class(*args, **kwargs)

    def register(self, cls, alias=None):
        """
        Register a class.

        Args:
            cls (type): class deriving from :class:`Registrable`.
            alias (str): custom alias for the identifier (optional).
        """
        if cls is None:
            return

        name = cls.NODE_NAME or cls.__name__
        type_ = cls.type_

        if self.__classes.get(type_):
            raise RegistrationError(
                'type "{}" already registered to "{}"! '
                'Please specify a new class name or __identifier__.'
                .format(type_, self.__classes[type_]))
        self.__classes[type_] = cls

        if self.__names.get(name):
            self.__names[name].append(type_)
        else:
            self.__names[name] = [type_]

        if alias:
            if self.__aliases.get(alias):
                raise RegistrationError(
                    'Alias: "{}" already registered to "{}"'
                    .format(alias, self.__aliases.get(alias))
                )
            self.__aliases[alias] = type_
