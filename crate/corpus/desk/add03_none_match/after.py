def version_of(text):
    match = pattern.search(text)
    if match is None:
        return None
    return match.group(1)
