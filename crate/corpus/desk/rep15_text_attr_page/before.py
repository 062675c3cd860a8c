def parse_page(client, url):
    page = client.get(url)
    return parse_html(page.content)
