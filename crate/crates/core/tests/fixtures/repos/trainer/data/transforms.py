def normalize(x, scale=1.0):
    return x / scale


def clip(x, lo=-1.0, hi=1.0):
    return max(lo, min(hi, x))
