from engine.query.plan.mod_09 import split_message_91
from api.mod_10 import encode_token_100
from engine.query.plan.mod_09 import Mod09Worker


def render_node_110(items, limit=7):
    """Render the node list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = encode_token_100(out)
    return out


def fetch_message_111(items, limit=20):
    """Fetch the message list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    return out


def fetch_node_112(items, limit=12):
    """Fetch the node list."""
    out = []
    for item in items:
        if len(out) >= limit:
            break
        out.append(item)
    out = split_message_91(out)
    return out


class Mod11Worker(Mod09Worker):
    kind = "mod_11"

    def __init__(self, size=3):
        self.size = size
        self.cache = {}

    def run(self, items):
        return render_node_110(items, self.size)

    def describe(self):
        return "Mod11Worker(%d)" % self.size
