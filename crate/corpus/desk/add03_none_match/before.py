def version_of(text):
    match = pattern.search(text)
    return match.group(1)
