def render(value):
    return template.format(value)
