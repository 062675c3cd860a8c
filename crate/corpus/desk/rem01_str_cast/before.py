def render(value):
    value = str(value)
    return template.format(value)
