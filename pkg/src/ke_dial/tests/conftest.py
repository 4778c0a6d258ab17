"""Shared fixtures: a navigation table, a restaurant table and a small movie graph."""

import pytest

from ke_dial.domain.dialogue import Dialogue, Speaker, Turn
from ke_dial.domain.graph import GraphKB
from ke_dial.domain.lexicon import EntityLexicon
from ke_dial.domain.table import TableKB

TABLE_1_QUERY = (
    "SELECT type, poi, distance, address FROM navigation "
    "GROUP BY type HAVING distance = MIN(distance)"
)

CAMREST_QUERY = "SELECT name, area, food, price, type FROM restaurant WHERE area = east AND price = moderate"

MOVIE_QUERY = (
    "MATCH n1-[ActorsIn]->n2, n1-[ActorsIn]->n3, n4-[ActorsIn]->n3, n4-[ActorsIn]->n6, "
    "n3-[HasGenre]->n5, n6-[HasGenre]->n5 RETURN n1, n2, n3, n4, n5, n6"
)

MOVIE_EDGES = {
    ("Tim Pigott-Smith", "ActorsIn", "Gangs of New York"),
    ("Tim Pigott-Smith", "ActorsIn", "Quantum of Solace"),
    ("Daniel Craig", "ActorsIn", "Quantum of Solace"),
    ("Daniel Craig", "ActorsIn", "The Girl with the Dragon Tattoo"),
    ("Quantum of Solace", "HasGenre", "thriller"),
    ("The Girl with the Dragon Tattoo", "HasGenre", "thriller"),
}


@pytest.fixture
def navigation_kb() -> TableKB:
    """
    车载导航 KB

    每种类型的最近地点：Valero (5 miles)、safeway (4 miles)、pizzahut (3 miles)
    """
    return TableKB(
        "navigation",
        ("poi", "type", "distance", "address"),
        (
            ("Valero", "gas station", "5 miles", "91 el camino real"),
            ("Chevron", "gas station", "6 miles", "783 arcadia pl"),
            ("safeway", "grocery store", "4 miles", "452 arcadia pl"),
            ("whole foods", "grocery store", "7 miles", "819 alma st"),
            ("pizzahut", "restaurant", "3 miles", "915 arbol dr"),
            ("panda express", "restaurant", "5 miles", "842 arrowhead way"),
        ),
    )


@pytest.fixture
def camrest_kb() -> TableKB:
    """餐厅 KB：东区两家中等价位印度餐厅，市中心两家便宜餐厅"""
    return TableKB(
        "restaurant",
        ("name", "area", "food", "price", "phone", "type"),
        (
            ("curry prince", "east", "indian", "moderate", "01223566388", "restaurant"),
            ("rajmahal", "east", "indian", "moderate", "01223244955", "restaurant"),
            ("pizza hut city centre", "centre", "italian", "cheap", "01223323737", "restaurant"),
            ("the golden house", "centre", "chinese", "cheap", "01842753771", "restaurant"),
        ),
    )


@pytest.fixture
def navigation_dialogue() -> Dialogue:
    return Dialogue(
        "nav-1",
        (
            Turn(Speaker.USR, "where is the closest gas station ?"),
            Turn(Speaker.SYS, "valero is 5 miles away at 91 el camino real"),
        ),
    )


@pytest.fixture
def camrest_dialogue() -> Dialogue:
    return Dialogue(
        "cam-1",
        (
            Turn(Speaker.USR, "i want a moderately priced restaurant in the east part of town"),
            Turn(
                Speaker.SYS,
                "curry prince is a moderately priced restaurant in the east part of town "
                "that serves indian food",
            ),
        ),
    )


@pytest.fixture
def movie_kg() -> GraphKB:
    """
    电影知识图谱

    包含六条目标边，以及几条干扰边（另一位演员、另一种类型）
    """
    distractors = {
        ("Leonardo DiCaprio", "ActorsIn", "Gangs of New York"),
        ("Gangs of New York", "HasGenre", "drama"),
        ("Rooney Mara", "ActorsIn", "The Girl with the Dragon Tattoo"),
    }
    return GraphKB.from_triples(MOVIE_EDGES | distractors)


@pytest.fixture
def movie_lexicon(movie_kg: GraphKB) -> EntityLexicon:
    return EntityLexicon.from_graph(movie_kg)


@pytest.fixture
def movie_dialogue() -> Dialogue:
    """电影推荐对话，提及六个实体"""
    return Dialogue(
        "kg-1",
        (
            Turn(Speaker.USR, "Any movies similar to Gangs of New York that you can recommend?"),
            Turn(Speaker.SYS, "Sure, Quantum of Solace has the same actor Tim Pigott-Smith."),
            Turn(Speaker.USR, "Is that the one with Daniel Craig?"),
            Turn(Speaker.SYS, "Yes, it is a thriller also starred by Daniel Craig."),
            Turn(Speaker.USR, "I really love thrillers. Any suggestion?"),
            Turn(Speaker.SYS, "Daniel Craig also starred in The Girl with the Dragon Tattoo"),
            Turn(Speaker.USR, "Thanks for the suggestion"),
        ),
    )


@pytest.fixture
def table_1_query() -> str:
    return TABLE_1_QUERY


@pytest.fixture
def camrest_query() -> str:
    return CAMREST_QUERY


@pytest.fixture
def movie_query() -> str:
    return MOVIE_QUERY


@pytest.fixture
def movie_edges() -> set[tuple[str, str, str]]:
    """六条目标边（演员 -ActorsIn-> 电影，电影 -HasGenre-> 类型）"""
    return set(MOVIE_EDGES)
