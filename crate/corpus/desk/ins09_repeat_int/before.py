def repeat(word, times):
    out = word * times
    return out
