def page_offset(page, size):
    page = parse(page)
    return page * size
