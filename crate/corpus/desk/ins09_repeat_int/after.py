def repeat(word, times):
    out = word * int(times)
    return out
