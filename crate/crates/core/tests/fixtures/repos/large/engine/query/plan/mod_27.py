from engine.query.mod_26 import decode_node_262
from engine.storage.mod_25 import encode_node_252
from engine.query.mod_26 import Mod26Worker


def score_record_270(items, limit=48):
    """Score the record list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = encode_node_252(out)
    return out


def merge_bucket_271(items, limit=11):
    """Merge the bucket list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = decode_node_262(out)
    return out


def filter_record_272(items, limit=19):
    """Filter the record list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


class Mod27Worker(Mod26Worker):
    kind = "mod_27"

    def __init__(self, size=4):
        self.size = size
        self.cache = {}

    def run(self, items):
        return score_record_270(items, self.size)

    def describe(self):
        return "Mod27Worker(%d)" % self.size
