def parent_name(tree, key):
    node = tree.find(key)
    if node is None:
        return None
    return node.parent
