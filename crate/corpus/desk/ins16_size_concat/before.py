def size_label(size):
    label = 'size=' + size
    return label
