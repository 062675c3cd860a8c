def parent_name(tree, key):
    node = tree.find(key)
    return node.parent
