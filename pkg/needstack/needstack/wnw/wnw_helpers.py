from dataclasses import asdict, dataclass

import needstack
from needstack import _

NEED_FORMS = frozenset(("need", "needs", "needing", "needed"))
WHO_UPOS = frozenset(("NOUN", "PROPN", "PRON"))
WHAT_UPOS = frozenset(("NOUN", "PROPN"))


@dataclass(frozen=True)
class LabelScheme:
    """Concrete dependency labels for the roles the rules look for."""

    name: str
    subject: str
    direct_object: str
    preposition: str
    prep_object: str
    copula: str
    nmod: str
    case: str

    @property
    def labels(self):
        labels = asdict(self)
        del labels["name"]
        return labels


SCHEMES = {
    # the labels of the CLEAR/Stanford-style parser output
    "clear": LabelScheme("clear", subject="nsubj", direct_object="dobj", preposition="prep",
                         prep_object="pobj", copula="cop", nmod="nmod", case="case"),
    # Universal Dependencies v2
    "ud": LabelScheme("ud", subject="nsubj", direct_object="obj", preposition="case",
                      prep_object="nmod", copula="cop", nmod="nmod", case="case"),
}


def get_scheme(scheme):
    if isinstance(scheme, LabelScheme):
        return scheme
    if scheme not in SCHEMES:
        needstack.throw(_("Unknown label scheme {0!r}; use one of {1}").format(scheme, ", ".join(SCHEMES)))
    return SCHEMES[scheme]


def nearest(candidates, index):
    """The candidate token closest to position `index`; the left one wins a tie."""
    if not candidates:
        return None
    return min(candidates, key=lambda tok: (abs(tok.index - index), tok.index))


def find_cycle(heads):
    """
        Return the index of a token on a head cycle, or None when every token reaches the root.
        Args:
            heads (list): heads[i - 1] is the head of token i; 0 is the root.
    """
    state = [0] * (len(heads) + 1)  # 0 unseen, 1 on current path, 2 reaches root
    state[0] = 2
    for start in range(1, len(heads) + 1):
        path = []
        node = start
        while state[node] == 0:
            state[node] = 1
            path.append(node)
            node = heads[node - 1]
        if state[node] == 1:
            return node
        for visited in path:
            state[visited] = 2
    return None
