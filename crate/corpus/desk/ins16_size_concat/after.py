def size_label(size):
    label = 'size=' + str(size)
    return label
