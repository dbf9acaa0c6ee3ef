def subclasses(cls):
    children = set(cls.__subclasses__())
    return children | set(grandchildren for child in children for grandchildren in subclasses(child))


def find_subclass(cls, key, **attributes):
    """Subclass of `cls` (at any depth) whose attributes match `attributes`

    `key` sorts candidates so the lookup is deterministic; the first match
    wins. Returns None when nothing matches."""

    for child in sorted(subclasses(cls), key=key):
        if all(matches(getattr(child, name, None), value) for name, value in attributes.items()):
            return child
    return None


def matches(class_value, value):
    if isinstance(class_value, (tuple, list, set, frozenset)):
        return value in class_value
    return class_value == value
