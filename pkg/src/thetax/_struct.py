"""Hash-consed immutable tree nodes.

Every node class is interned: constructing a node whose fields equal an
existing node's returns that same object. Structural equality is therefore
identity, and hashing falls back to the fast builtin object hash.  Iteration
order of sets of nodes depends on addresses, so never emit from a set.
"""


class Interned(type):
    def __call__(cls, *args):
        table = cls.__dict__.get("_intern")
        if table is None:
            table = {}
            type.__setattr__(cls, "_intern", table)
        obj = table.get(args)
        if obj is None:
            obj = super().__call__(*args)
            table[args] = obj
        return obj


class Struct(metaclass=Interned):
    __slots__ = ()

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __reduce__(self):
        return (type(self), tuple(getattr(self, n) for n in self.__dataclass_fields__))
