"""Random bounded relation values for property tests."""
import itertools
import random

from hoql.logic import HORelation, RelationType


def random_so(rng, n, r, density=0.4):
    return frozenset(t for t in itertools.product(range(n), repeat=r) if rng.random() < density)


def random_rank3(rng, n, rtype, d, max_members=None):
    bound = n ** d if max_members is None else min(max_members, n ** d)
    k = rng.randint(0, bound)
    members = set()
    for _ in range(4 * k):
        if len(members) == k:
            break
        members.add(tuple(random_so(rng, n, r, rng.choice((0.0, 0.3, 0.6, 1.0))) for r in rtype.components))
    return HORelation(3, rtype, frozenset(members))


def random_rank4(rng, n, rtype, d):
    bound = n ** d
    k = rng.randint(0, bound)
    members = set()
    for _ in range(4 * k):
        if len(members) == k:
            break
        members.add(tuple(random_rank3(rng, n, c, d).tuples for c in rtype.components))
    return HORelation(4, rtype, frozenset(members))


def random_to_type(rng, max_width=2, max_arity=2):
    return RelationType.to(*(rng.randint(1, max_arity) for _ in range(rng.randint(1, max_width))))


def random_ho4_type(rng, max_width=2, max_arity=2):
    s = rng.randint(1, max_width)
    r = rng.randint(1, max_arity)
    return RelationType.ho4(*(RelationType.to(*([r] * s)) for _ in range(s)))


def rng(seed):
    return random.Random(seed)
