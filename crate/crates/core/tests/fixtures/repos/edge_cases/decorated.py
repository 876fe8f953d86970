import functools


def traced(fn):
    @functools.wraps(fn)
    def inner(*a, **k):
        return fn(*a, **k)

    return inner


@traced
def work(x):
    return x * 2


class Box:
    @staticmethod
    def make():
        return Box()

    @property
    def size(self):
        return 0
