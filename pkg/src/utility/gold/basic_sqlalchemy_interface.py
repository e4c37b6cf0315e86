# -*- coding: utf-8 -*-
"""
****************************************************
*                   Utility
*            (c) 2023 Alexander Hering             *
****************************************************
"""
from typing import Optional, Any, List, Callable, Dict
from ..bronze import sqlalchemy_utility


class BasicSQLAlchemyInterface(object):
    """
    Class, representing a table-by-name interface over ORM classes on one engine.
    """

    def __init__(self, database_uri: str, population_function: Callable, schema: str = None,
                 logger: Any = None) -> None:
        """
        Initiation method.
        :param database_uri: Database URI.
        :param population_function: Function, taking an engine, a schema prefix and a dictionary it fills with
            ORM classes by table name. It is expected to create the tables.
        :param schema: Schema prefix for table names.
            Defaults to None.
        :param logger: Logger for setup messages.
            Defaults to None.
        """
        self._logger = logger
        self.database_uri = database_uri
        self.schema = "" if schema is None else schema
        self.engine = sqlalchemy_utility.get_engine(database_uri)
        self.model: Dict[str, Any] = {}
        population_function(self.engine, self.schema, self.model)
        self.session_factory = sqlalchemy_utility.get_session_factory(self.engine)
        self.primary_keys = {table: self.model[table].__mapper__.primary_key[0].name for table in self.model}
        if self._logger is not None:
            self._logger.debug(f"Set up tables {sorted(self.model)} on '{database_uri}'")

    """
    Reading
    """

    def get_object_count_by_type(self, object_type: str) -> int:
        """
        Method for counting the rows of a table.
        :param object_type: Table name.
        :return: Row count.
        """
        statement = sqlalchemy_utility.select(sqlalchemy_utility.func.count()).select_from(self.model[object_type])
        with self.session_factory() as session:
            return int(session.execute(statement).scalar())

    def get_objects_by_type(self, object_type: str, order_by: str = None) -> List[Any]:
        """
        Method for listing the rows of a table.
        :param object_type: Table name.
        :param order_by: Column to sort by.
            Defaults to None in which case the primary key is used.
        :return: Rows.
        """
        entity = self.model[object_type]
        column = getattr(entity, self.primary_keys[object_type] if order_by is None else order_by)
        with self.session_factory() as session:
            return list(session.execute(sqlalchemy_utility.select(entity).order_by(column)).scalars())

    def get_objects_by_attribute(self, object_type: str, attribute: str, value: Any) -> List[Any]:
        """
        Method for listing the rows of a table with a column equal to a value.
        :param object_type: Table name.
        :param attribute: Column name.
        :param value: Column value.
        :return: Rows in primary key order.
        """
        entity = self.model[object_type]
        statement = sqlalchemy_utility.select(entity).where(getattr(entity, attribute) == value).order_by(
            getattr(entity, self.primary_keys[object_type]))
        with self.session_factory() as session:
            return list(session.execute(statement).scalars())

    def get_object_by_id(self, object_type: str, object_id: Any) -> Optional[Any]:
        """
        Method for fetching a row by primary key.
        :param object_type: Table name.
        :param object_id: Primary key value.
        :return: Row, if present.
        """
        with self.session_factory() as session:
            return session.get(self.model[object_type], object_id)

    """
    Writing
    """

    def post_object(self, object_type: str, **object_attributes: Optional[Any]) -> Optional[Any]:
        """
        Method for inserting a row.
        :param object_type: Table name.
        :param object_attributes: Column values.
        :return: Primary key of the new row.
        """
        row = self.model[object_type](**object_attributes)
        with self.session_factory() as session:
            session.add(row)
            session.commit()
            session.refresh(row)
            return getattr(row, self.primary_keys[object_type])

    def post_objects(self, object_type: str, objects: List[dict]) -> int:
        """
        Method for inserting rows in one transaction.
        :param object_type: Table name.
        :param objects: Column values per row.
        :return: Number of inserted rows.
        """
        with self.session_factory() as session:
            session.add_all([self.model[object_type](**attributes) for attributes in objects])
            session.commit()
        return len(objects)
